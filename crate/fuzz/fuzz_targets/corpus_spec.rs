#![no_main]

use hsm_core::oned::parse_corpus_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // random corpora are generated eagerly; keep inputs cheap
    if text.len() > 4096 {
        return;
    }
    if let Ok(entries) = parse_corpus_spec(text) {
        for e in entries.iter().take(4) {
            let _ = e.function.support();
            let _ = e.function.value(0.0);
        }
    }
});
