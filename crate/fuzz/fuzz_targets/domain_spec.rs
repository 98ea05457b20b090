#![no_main]

use hsm_core::geometry::parse_domain_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_domain_spec(text) else { return };
    let d = spec.domain;
    // accepted specs must survive a round trip and answer queries
    let back = parse_domain_spec(&d.to_spec_json()).expect("re-parse of serialized domain");
    assert_eq!(back.domain.dim(), d.dim());
    let (lo, hi) = d.bounding_box();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    if d.contains(&mid).unwrap_or(false) {
        let _ = d.boundary_distance(&mid);
    }
});
