use std::sync::Arc;

use proptest::prelude::*;

use hsm_core::forms::{self, FormParams, GridFunction, HardyWeight};
use hsm_core::geometry::parse_domain_spec;
use hsm_core::io;
use hsm_core::oned::{self, Bump, GnInput, TestFunction1D};
use hsm_core::spectral::{self, Potential};
use hsm_core::sphere::{self, SphereQuadrature, WeightField};
use hsm_core::{Domain, Grid};

fn square() -> Domain {
    Domain::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

fn random_function(grid: &Arc<Grid>, vals: &[f64]) -> GridFunction {
    let active = grid.active_nodes();
    let v: Vec<f64> = (0..active.len()).map(|k| vals[k % vals.len()] * ((k * 7919) % 13) as f64).collect();
    GridFunction::from_active(grid.clone(), &v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_matches_form(vals in prop::collection::vec(-1.0f64..1.0, 1..20), eps in 0.0f64..1.0, depth in 0.0f64..50.0) {
        let d = square();
        let grid = Grid::new(&d, 1.0 / 16.0).unwrap();
        let w = sphere::weight_field(&d, grid.clone(), 2.0, &SphereQuadrature::new(2, &[256]).unwrap()).unwrap();
        let v = Potential::well(grid.clone(), depth, &[0.4, 0.6], 0.3).unwrap();
        let u = random_function(&grid, &vals);
        let op = spectral::assemble(&grid, Some(&w), Some(&v), eps).unwrap();
        let ua = u.active_values();
        let h2 = grid.cell_volume();
        let quad = op.matrix.quadratic_form(&ua) * h2;
        let params = FormParams { p: 2.0, epsilon: eps, hardy: HardyWeight::Davies };
        let pot: f64 = grid.active_nodes().iter().zip(&ua).map(|(&i, x)| v.get(i) * x * x).sum::<f64>() * h2;
        let form = forms::hsm_form(&u, &w, &params).unwrap() + pot;
        let scale = forms::gradient_power_integral(&u, 2.0) + pot.abs() + 1e-300;
        prop_assert!((quad - form).abs() <= 1e-10 * scale, "{} vs {}", quad, form);
    }

    #[test]
    fn negative_count_decreases_with_epsilon(depth in 1.0f64..400.0, r in 0.1f64..0.5) {
        let d = square();
        let grid = Grid::new(&d, 1.0 / 14.0).unwrap();
        let w = WeightField::euclidean(grid.clone(), 2.0);
        let v = Potential::well(grid.clone(), depth, &[0.5, 0.5], r).unwrap();
        let mut prev = usize::MAX;
        for eps in [0.0, 0.25, 0.5, 1.0] {
            let op = spectral::assemble(&grid, Some(&w), Some(&v), eps).unwrap();
            let c = spectral::count_negative(&op).unwrap();
            prop_assert!(c.count <= prev);
            prev = c.count;
        }
    }

    #[test]
    fn davies_weight_is_similarity_covariant(x in 0.05f64..0.95, y in 0.05f64..0.95, s in 0.1f64..10.0, a in -5.0f64..5.0) {
        let quad = SphereQuadrature::default_for(2).unwrap();
        let tri = Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        prop_assume!(x + y < 0.95);
        let moved = Domain::polygon(vec![[a, a], [a + s, a], [a, a + s]]).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let d0 = sphere::davies_weight(&tri, &[x, y], p, &quad).unwrap();
            let d1 = sphere::davies_weight(&moved, &[a + s * x, a + s * y], p, &quad).unwrap();
            prop_assert!((d1 - s * d0).abs() <= 1e-12 * s * d0.max(1.0));
        }
    }

    #[test]
    fn key_ratio_is_scale_invariant_and_bounded(c in -0.3f64..0.3, r in 0.2f64..0.6, m in 2u32..5, k in 0.1f64..5.0, q in 2.0f64..10.0) {
        let f = TestFunction1D::Bumps { bumps: vec![Bump { center: c, radius: r, m, coef: 1.0 }, Bump { center: c + 0.1, radius: 0.5 * r, m: 3, coef: 0.4 }] };
        let base = oned::key_ratio(&f, q).unwrap().ratio;
        let scaled = oned::key_ratio(&f.scaled(k), q).unwrap().ratio;
        prop_assert!((base - scaled).abs() <= 1e-9 * base);
        prop_assert!(base <= oned::key_bound(q));
    }

    #[test]
    fn product_lemma_lhs_below_rhs(seed in any::<u64>(), n in 2usize..8) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let factors = (0..3).map(|_| (0..n * n).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let r = oned::gn_product_check(&GnInput { dim: 3, n, h: 0.3, factors }).unwrap();
        prop_assert!(r.lhs <= r.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn potential_csv_round_trip(vals in prop::collection::vec(-100.0f64..100.0, 1..50)) {
        let d = Domain::interval_union(vec![(0.0, 1.0)]).unwrap();
        let grid = Grid::new(&d, 1.0 / 32.0).unwrap();
        let v = Potential::from_fn(grid.clone(), |x| vals[((x[0] * 97.0) as usize) % vals.len()]).unwrap();
        let mut text = String::from("# potential\nx1,V\n");
        for &i in grid.active_nodes() {
            text += &format!("{:.17e},{:.17e}\n", grid.coords(i)[0], v.get(i));
        }
        let rows = io::parse_potential_csv(&text, 1).unwrap();
        let back = io::potential_from_rows(&grid, &rows).unwrap();
        for &i in grid.active_nodes() {
            prop_assert_eq!(back.get(i), v.get(i));
        }
    }
}

#[test]
fn domain_spec_round_trip() {
    let domains = vec![
        Domain::interval_union(vec![(-1.0, 0.0), (0.5, 2.0)]).unwrap(),
        Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 1.5]]).unwrap(),
        Domain::ball(vec![0.0, 1.0, 2.0], 0.7).unwrap(),
        Domain::axis_box(vec![0.0, 0.0], vec![1.0, 3.0]).unwrap(),
        Domain::convex_polytope(vec![(vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], 1.0), (vec![0.0, 1.0], 1.0), (vec![0.0, -1.0], 1.0)]).unwrap(),
    ];
    for d in domains {
        let back = parse_domain_spec(&d.to_spec_json()).unwrap().domain;
        assert_eq!(back.dim(), d.dim());
        let x = vec![0.3; d.dim()];
        assert_eq!(back.contains(&x).unwrap(), d.contains(&x).unwrap());
        if d.contains(&x).unwrap() {
            assert_eq!(back.boundary_distance(&x).unwrap(), d.boundary_distance(&x).unwrap());
        }
    }
}

#[test]
fn weight_csv_matches_library_values() {
    let d = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
    let grid = Grid::new(&d, 0.2).unwrap();
    let w = sphere::weight_field(&d, grid.clone(), 2.0, &SphereQuadrature::default_for(2).unwrap()).unwrap();
    let mut table = io::Table::new(&["node", "D"]);
    for &i in grid.active_nodes() {
        table.push(vec![io::Cell::Int(i as i64), io::Cell::Num(w.get(i).unwrap())]);
    }
    let mut buf = Vec::new();
    io::write_csv(&mut buf, &io::RunManifest::new("weight", 0, 1), &table).unwrap();
    let (_, cols, rows) = io::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(cols, vec!["node", "D"]);
    for r in rows {
        let i: usize = r[0].parse().unwrap();
        assert_eq!(r[1].parse::<f64>().unwrap(), w.get(i).unwrap());
    }
}
