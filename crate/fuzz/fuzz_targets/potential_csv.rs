#![no_main]

use hsm_core::io::{parse_potential_csv, potential_from_rows};
use hsm_core::{Domain, Grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&dim, rest)) = data.split_first() else { return };
    let dim = 1 + (dim % 2) as usize;
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(rows) = parse_potential_csv(text, dim) else { return };
    for (x, v) in &rows {
        assert_eq!(x.len(), dim);
        assert!(v.is_finite());
    }
    let d = if dim == 1 {
        Domain::interval_union(vec![(0.0, 1.0)]).unwrap()
    } else {
        Domain::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    };
    let grid = Grid::new(&d, 0.25).unwrap();
    let _ = potential_from_rows(&grid, &rows);
});
