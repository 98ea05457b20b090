#![no_main]

use hsm_core::io::{parse_potential_spec, PotentialSpec};
use hsm_core::{Domain, Grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_potential_spec(text) else { return };
    if matches!(spec, PotentialSpec::File(_)) {
        return;
    }
    let d = Domain::interval_union(vec![(-1.0, 1.0)]).unwrap();
    let grid = Grid::new(&d, 0.25).unwrap();
    let _ = spec.build(&grid);
});
