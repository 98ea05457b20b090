//! Replays the fuzz seed corpora and random inputs through every parser.

use std::path::PathBuf;

use proptest::prelude::*;

use hsm_core::geometry::parse_domain_spec;
use hsm_core::io::{parse_potential_csv, parse_potential_spec, potential_from_rows, PotentialSpec};
use hsm_core::oned::parse_corpus_spec;
use hsm_core::{Domain, Grid};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn domain_spec(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_domain_spec(text) else { return };
    let back = parse_domain_spec(&spec.domain.to_spec_json()).expect("re-parse");
    assert_eq!(back.domain.dim(), spec.domain.dim());
}

fn corpus_spec(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = parse_corpus_spec(text) {
        for e in entries.iter().take(4) {
            let _ = e.function.support();
        }
    }
}

fn potential_spec(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_potential_spec(text) else { return };
    if matches!(spec, PotentialSpec::File(_)) {
        return;
    }
    let grid = Grid::new(&Domain::interval_union(vec![(-1.0, 1.0)]).unwrap(), 0.25).unwrap();
    let _ = spec.build(&grid);
}

fn potential_csv(data: &[u8]) {
    let Some((&dim, rest)) = data.split_first() else { return };
    let dim = 1 + (dim % 2) as usize;
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(rows) = parse_potential_csv(text, dim) else { return };
    assert!(rows.iter().all(|(x, v)| x.len() == dim && v.is_finite()));
    let d = if dim == 1 {
        Domain::interval_union(vec![(0.0, 1.0)]).unwrap()
    } else {
        Domain::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    };
    let _ = potential_from_rows(&Grid::new(&d, 0.25).unwrap(), &rows);
}

#[test]
fn seed_corpora_replay() {
    let targets: [(&str, fn(&[u8])); 4] = [
        ("domain_spec", domain_spec),
        ("corpus_spec", corpus_spec),
        ("potential_spec", potential_spec),
        ("potential_csv", potential_csv),
    ];
    for (name, f) in targets {
        for s in seeds(name) {
            f(&s);
            // truncations and single-byte flips of each seed
            for cut in 0..s.len() {
                f(&s[..cut]);
            }
            for i in 0..s.len() {
                let mut m = s.clone();
                m[i] ^= 0x20;
                f(&m);
            }
        }
    }
}

#[test]
fn seeds_cover_accept_and_reject() {
    let ok = seeds("domain_spec").iter().filter(|s| parse_domain_spec(std::str::from_utf8(s).unwrap()).is_ok()).count();
    assert!(ok >= 4);
    assert!(ok < seeds("domain_spec").len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_bytes_never_panic(data in prop::collection::vec(any::<u8>(), 0..256)) {
        domain_spec(&data);
        corpus_spec(&data);
        potential_spec(&data);
        potential_csv(&data);
    }

    #[test]
    fn structured_potential_specs(kind in "(const|well|bump)", a in "-?[0-9]{0,4}(\\.[0-9]{0,3})?(e-?[0-9]{1,3})?", b in "[0-9a-z.,:-]{0,12}") {
        potential_spec(format!("{kind}:{a}:{b}").as_bytes());
    }

    #[test]
    fn structured_domain_specs(dim in 0u32..5, shape in "(polygon|ball|box|polytope|interval_union)", nums in prop::collection::vec(-1e3f64..1e3, 0..12)) {
        let arr = serde_json_like(&nums);
        let text = format!(r#"{{"dim": {dim}, "shape": "{shape}", "vertices": [{arr}], "center": {arr}, "radius": 1, "min": {arr}, "max": {arr}, "intervals": [{arr}], "halfspaces": []}}"#);
        domain_spec(text.as_bytes());
    }
}

fn serde_json_like(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(","))
}
