//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hsm_core::constants::{self, ConstantChain};
use hsm_core::forms::{self, DescentOptions, FormParams, GridFunction, HardyWeight};
use hsm_core::geometry::random;
use hsm_core::linalg::symmetric_eigenvalues;
use hsm_core::oned::{self, BumpFamily, GnInput, RandomCorpus, SearchOptions};
use hsm_core::spectral::{self, Method, Potential};
use hsm_core::sphere::{self, SphereQuadrature, WeightField};
use hsm_core::{Domain, Grid};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// 1. D_Ω(x) ≈ x_N on a box that is long in the tangential directions.
fn half_space_recovery() -> Outcome {
    let l = 1e4;
    let domain = Domain::axis_box(vec![-l, -l, 0.0], vec![l, l, l]).map_err(err)?;
    let quad = SphereQuadrature::default_for(3).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.01..1.0)];
        let d = sphere::davies_weight(&domain, &x, 2.0, &quad).map_err(err)?;
        worst = worst.max((d - x[2]).abs() / x[2]);
    }
    check(worst < 1e-3, || format!("max relative error {worst:.3e}"))?;
    Ok(format!("max |D - x_N|/x_N = {worst:.2e} over 100 points"))
}

/// 2. D_{Ω,p}(center) of a ball equals R·c_{N,p}^{−1/p}.
fn ball_center_anchor() -> Outcome {
    let mut worst: f64 = 0.0;
    for dim in 1..=3 {
        let quad = SphereQuadrature::default_for(dim).map_err(err)?;
        for r in [0.3, 1.0, 1.7] {
            let center = vec![0.25; dim];
            let ball = Domain::ball(center.clone(), r).map_err(err)?;
            for p in [1.0, 2.0, 3.0] {
                // √π Γ((N+p)/2) / (Γ((p+1)/2) Γ(N/2))
                let n = dim as f64;
                let c = std::f64::consts::PI.sqrt() * statrs::function::gamma::gamma((n + p) / 2.0)
                    / (statrs::function::gamma::gamma((p + 1.0) / 2.0) * statrs::function::gamma::gamma(n / 2.0));
                let expected = r * c.powf(-1.0 / p);
                let d = sphere::davies_weight(&ball, &center, p, &quad).map_err(err)?;
                worst = worst.max((d - expected).abs());
                if p == 2.0 {
                    worst = worst.max((d - r / n.sqrt()).abs());
                }
            }
        }
    }
    check(worst <= 1e-9, || format!("max error {worst:.3e}"))?;
    Ok(format!("max |D(center) - R c^(-1/p)| = {worst:.2e}"))
}

/// 3. c_{N,2} = N and the spherical moment identity.
fn gamma_identity() -> Outcome {
    let mut worst_c: f64 = 0.0;
    for n in 1..=10 {
        let c = sphere::gamma_normalization(n, 2.0).map_err(err)?;
        worst_c = worst_c.max((c - n as f64).abs());
    }
    check(worst_c <= 1e-12, || format!("c_(N,2) error {worst_c:.3e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_m: f64 = 0.0;
    for dim in [2, 3] {
        let quad = SphereQuadrature::default_for(dim).map_err(err)?;
        for _ in 0..50 {
            let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            for p in [1.0, 2.0, 3.0, 4.0] {
                let (numeric, formula) = sphere::sphere_moment_check(&a, p, &quad).map_err(err)?;
                let n = dim as f64;
                let oracle = statrs::function::gamma::gamma((p + 1.0) / 2.0) * statrs::function::gamma::gamma(n / 2.0)
                    / (std::f64::consts::PI.sqrt() * statrs::function::gamma::gamma((n + p) / 2.0))
                    * norm.powf(p);
                check((formula - oracle).abs() <= 1e-12 * oracle, || format!("formula {formula} vs {oracle}"))?;
                worst_m = worst_m.max((numeric - formula).abs() / formula);
            }
        }
    }
    check(worst_m <= 1e-6, || format!("moment relative error {worst_m:.3e}"))?;
    Ok(format!("c_(N,2) error {worst_c:.1e}; moment relative error {worst_m:.2e}"))
}

/// 4. D_{Ω,p} ≤ dist(x, Ω^c) on convex domains.
fn convexity_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut run = |domain: &Domain, quad: &SphereQuadrature, rng: &mut ChaCha8Rng| -> Result<(), String> {
        for _ in 0..50 {
            let x = random::interior_point(rng, domain, 0.0);
            let dist = domain.boundary_distance(&x).map_err(err)?;
            for p in [2.0, 3.0] {
                let d = sphere::davies_weight(domain, &x, p, quad).map_err(err)?;
                worst = worst.max(d / dist - 1.0);
                checked += 1;
            }
        }
        Ok(())
    };
    let q2 = SphereQuadrature::default_for(2).map_err(err)?;
    for _ in 0..100 {
        let k = rng.random_range(3..12);
        let poly = random::convex_polygon(&mut rng, k);
        run(&poly, &q2, &mut rng)?;
    }
    // 50·2·20 evaluations at 1M directions would not fit the time budget on one core
    let q3 = SphereQuadrature::new(3, &[128, 256]).map_err(err)?;
    for _ in 0..20 {
        let faces = rng.random_range(6..14);
        let poly = random::convex_polytope(&mut rng, 3, faces);
        run(&poly, &q3, &mut rng)?;
    }
    check(worst <= 1e-3, || format!("max D/dist - 1 = {worst:.3e}"))?;
    Ok(format!("{checked} evaluations, max D/dist - 1 = {worst:.2e}"))
}

const QS: [f64; 5] = [2.0, 3.0, 4.0, 6.0, 10.0];

/// 5. key_ratio ≤ (q+2)² on a 1000-function corpus and under adversarial search.
fn key_inequality() -> Outcome {
    let corpus = oned::generate_corpus(&RandomCorpus { count: 1000, seed: 5 });
    let mut worst = vec![0.0f64; QS.len()];
    for e in &corpus {
        for (k, r) in oned::keyp_ratios(&e.function, 2.0, &QS).map_err(err)?.into_iter().enumerate() {
            let r = r.map_err(|x| format!("{}: {x}", e.id))?;
            check(r.ratio <= oned::key_bound(QS[k]), || format!("{} q={} ratio {}", e.id, QS[k], r.ratio))?;
            worst[k] = worst[k].max(r.ratio);
        }
    }
    let family = BumpFamily::standard(8).map_err(err)?;
    let mut searched = Vec::new();
    for &q in &QS {
        let s = oned::worst_case_search(&family, 2.0, q, &SearchOptions { restarts: 20, iterations: 60, seed: 5 })
            .map_err(err)?;
        check(s.ratio <= oned::key_bound(q), || format!("search q={q} ratio {}", s.ratio))?;
        check(s.per_restart.iter().all(|r| *r <= oned::key_bound(q)), || format!("search q={q} restart exceeds"))?;
        let k = searched.len();
        searched.push(format!(
            "q={q}: {:.4} (search {:.4}, corpus {:.4}, bound {})",
            s.ratio.max(worst[k]),
            s.ratio,
            worst[k],
            oned::key_bound(q)
        ));
    }
    Ok(format!("empirical lower bounds {}", searched.join("; ")))
}

/// 6. keyp at p = 2 agrees with key; finite ratios for p ∈ {2.5, 3}.
fn p_version() -> Outcome {
    let corpus = oned::generate_corpus(&RandomCorpus { count: 1000, seed: 6 });
    let mut worst: f64 = 0.0;
    for e in &corpus {
        let p2 = oned::keyp_ratios(&e.function, 2.0, &QS).map_err(err)?;
        for (k, r) in p2.into_iter().enumerate() {
            let a = oned::key_ratio(&e.function, QS[k]).map_err(err)?.ratio;
            let b = r.map_err(err)?.ratio;
            worst = worst.max((a - b).abs() / a);
        }
    }
    check(worst <= 1e-10, || format!("keyp(p=2) vs key relative difference {worst:.3e}"))?;
    let mut report = Vec::new();
    for p in [2.5, 3.0] {
        let qs: Vec<f64> = [3.0, 4.0, 6.0, 10.0].into_iter().filter(|q| *q >= p).collect();
        let mut best = vec![0.0f64; qs.len()];
        for e in &corpus {
            for (k, r) in oned::keyp_ratios(&e.function, p, &qs).map_err(err)?.into_iter().enumerate() {
                let r = r.map_err(|x| format!("{} p={p}: {x}", e.id))?;
                check(r.ratio.is_finite() && r.ratio > 0.0, || format!("{} p={p} q={} ratio {}", e.id, qs[k], r.ratio))?;
                best[k] = best[k].max(r.ratio);
            }
        }
        for (q, c) in qs.iter().zip(best) {
            report.push(format!("C({p},{q}) >= {c:.4}"));
        }
    }
    Ok(format!("p=2 max relative difference {worst:.1e}; {}", report.join(", ")))
}

/// 7. Negative part of the discrete Hardy form under grid refinement.
fn hardy_form_nonnegativity() -> Outcome {
    let hs: Vec<f64> = (7..=10).map(|k| 2f64.powi(-k)).collect();
    let domains = [
        ("interval", Domain::interval_union(vec![(-1.0, 1.0)]).map_err(err)?, 40usize),
        ("square", Domain::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).map_err(err)?, 12usize),
    ];
    let params = FormParams { p: 2.0, epsilon: 0.0, hardy: HardyWeight::Euclidean };
    let (mut negative, mut pairs, mut pairs_checked, mut min_form) = (0usize, 0usize, 0usize, f64::INFINITY);
    for (name, domain, count) in &domains {
        let corpus = forms::smooth_corpus(domain, *count, 7);
        let mut neg = vec![vec![0.0; hs.len()]; corpus.len()];
        for (j, &h) in hs.iter().enumerate() {
            let grid = Grid::new(domain, h).map_err(err)?;
            let w = WeightField::euclidean(grid.clone(), 2.0);
            for (i, prof) in corpus.iter().enumerate() {
                let u = prof.sample(grid.clone());
                let form = forms::hsm_form(&u, &w, &params).map_err(err)?;
                let scale = forms::gradient_power_integral(&u, 2.0);
                min_form = min_form.min(form / scale);
                neg[i][j] = (-form).max(0.0);
                check(neg[i][j] <= h * scale, || format!("{name} #{i} h={h}: negative part {} > h*scale", neg[i][j]))?;
                negative += (neg[i][j] > 0.0) as usize;
            }
        }
        for (i, row) in neg.iter().enumerate() {
            for j in 1..hs.len() {
                pairs += 1;
                if row[j - 1] > 0.0 {
                    pairs_checked += 1;
                    let f = row[j] / row[j - 1];
                    check((0.4..=0.6).contains(&f), || format!("{name} #{i}: negative part ratio {f:.3}"))?;
                } else {
                    check(row[j] == 0.0, || format!("{name} #{i}: negative part appeared at h={}", hs[j]))?;
                }
            }
        }
    }
    Ok(format!(
        "{negative} negative forms; {pairs_checked}/{pairs} refinement pairs with a nonzero negative part; min form/energy {min_form:.3}"
    ))
}

/// 8. Exact discrete minimum of the 1D Hardy ratio decreases toward 1.
fn sharp_constant_approach() -> Outcome {
    let domain = Domain::interval_union(vec![(-1.0, 1.0)]).map_err(err)?;
    let mut mins = Vec::new();
    for k in 7..=11 {
        let grid = Grid::new(&domain, 2f64.powi(-k)).map_err(err)?;
        let w = WeightField::euclidean(grid.clone(), 2.0);
        let exact = forms::hardy_ratio_minimum(&w, 1e-13).map_err(err)?;
        let init = GridFunction::from_fn(grid.clone(), |x| (1.0 - x[0] * x[0]).powf(0.6));
        let run = forms::minimize_hardy_ratio(&init, &w, &DescentOptions { iterations: 200, ..Default::default() })
            .map_err(err)?;
        let last = run.trace.last().unwrap().quotient;
        check(last >= exact * (1.0 - 1e-10), || format!("h=2^-{k}: descent {last} below exact minimum {exact}"))?;
        check(run.trace.windows(2).all(|t| t[1].quotient <= t[0].quotient), || "trace not monotone".into())?;
        check(exact >= 0.97, || format!("h=2^-{k}: minimum {exact}"))?;
        mins.push(exact);
    }
    check(mins.windows(2).all(|m| m[1] < m[0]), || format!("not strictly decreasing: {mins:?}"))?;
    Ok(format!("minima {}", mins.iter().map(|m| format!("{m:.5}")).collect::<Vec<_>>().join(" > ")))
}

/// 9. Birman–Schwinger counts agree exactly.
fn birman_schwinger() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mus: Vec<f64> = (0..10).map(|k| 10f64.powf(0.5 * k as f64)).collect();
    let (mut instances, mut nonzero, mut largest) = (0, 0, 0);
    for i in 0..100 {
        let grid = if i % 2 == 0 {
            let n = rng.random_range(5..=400);
            Grid::new(&Domain::interval_union(vec![(0.0, 1.0)]).map_err(err)?, 1.0 / (n + 1) as f64).map_err(err)?
        } else {
            let (a, b) = (rng.random_range(2..=20), rng.random_range(2..=20));
            let h = 1.0 / 16.0;
            let d = Domain::axis_box(vec![0.0, 0.0], vec![(a + 1) as f64 * h, (b + 1) as f64 * h]).map_err(err)?;
            Grid::new(&d, h).map_err(err)?
        };
        largest = largest.max(grid.active_nodes().len());
        let vals: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(0.01..1.0)).collect();
        let w = Potential::new(grid, vals).map_err(err)?;
        for tau in [0.0, 1.0] {
            instances += 1;
            for (mu, (a, b)) in mus.iter().zip(spectral::birman_schwinger_counts(&w, &mus, tau).map_err(err)?) {
                check(a == b, || format!("instance {i} tau={tau} mu={mu}: {a} != {b}"))?;
                nonzero += (a > 0) as usize;
            }
        }
    }
    check(largest <= 400, || format!("instance with {largest} unknowns"))?;
    Ok(format!("{instances} instances x 10 couplings, {nonzero} with nonzero counts, largest {largest} unknowns"))
}

/// 10. Inertia count equals the dense count.
fn inertia_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut by_inertia, mut largest, mut total_neg) = (0, 0, 0);
    for i in 0..50 {
        let (domain, h) = match i % 5 {
            0 | 1 => (Domain::interval_union(vec![(-1.0, 1.0)]).map_err(err)?, 2.0 / rng.random_range(20..2000) as f64),
            2 => (Domain::axis_box(vec![0.0, 0.0], vec![1.0, 1.5]).map_err(err)?, 1.0 / rng.random_range(8..36) as f64),
            3 => (random::convex_polygon(&mut rng, 7), rng.random_range(0.05..0.15)),
            _ => (Domain::ball(vec![0.0, 0.0, 0.0], 1.0).map_err(err)?, 2.0 / rng.random_range(6..15) as f64),
        };
        let grid = Grid::new(&domain, h).map_err(err)?;
        let n = grid.active_nodes().len();
        if n == 0 || n > 2000 {
            continue;
        }
        largest = largest.max(n);
        let w = WeightField::euclidean(grid.clone(), 2.0);
        let depth = 10f64.powf(rng.random_range(0.0..4.0));
        let x0 = random::interior_point(&mut rng, &domain, 0.0);
        let r = rng.random_range(0.1..0.6);
        let v = Potential::well(grid.clone(), depth, &x0, r).map_err(err)?;
        let eps = [0.0, 0.01, 0.5, 1.0][i % 4];
        let op = spectral::assemble(&grid, Some(&w), Some(&v), eps).map_err(err)?;
        let c = spectral::count_negative(&op).map_err(err)?;
        let dense = symmetric_eigenvalues(op.matrix.to_dense()).map_err(err)?;
        let dense_neg = dense.iter().filter(|&&l| l < 0.0).count();
        check(c.indeterminate == 0, || format!("operator {i}: {} indeterminate eigenvalues", c.indeterminate))?;
        check(c.count == dense_neg, || format!("operator {i} ({n} unknowns): inertia {} vs dense {dense_neg}", c.count))?;
        by_inertia += (c.method == Method::Inertia) as usize;
        total_neg += dense_neg;
    }
    Ok(format!("50 operators ({by_inertia} via LDLT inertia), largest {largest} unknowns, {total_neg} negative eigenvalues in total"))
}

/// 11. CLR and HLT bounds with chain constants.
fn clr_hlt_bounds() -> Outcome {
    let mut slacks = Vec::new();
    let chain = ConstantChain::sobolev(3).map_err(err)?;
    let l3 = chain.ln.unwrap();
    let ball = Domain::ball(vec![0.0, 0.0, 0.0], 1.0).map_err(err)?;
    let quad = SphereQuadrature::new(3, &[16, 32]).map_err(err)?;
    for m in [16, 24, 32] {
        let grid = Grid::new(&ball, 2.0 / m as f64).map_err(err)?;
        let w = sphere::weight_field(&ball, grid.clone(), 2.0, &quad).map_err(err)?;
        for c in [10.0, 1e3, 1e5] {
            let v = Potential::from_fn(grid.clone(), |x| {
                let s2: f64 = x.iter().map(|a| a * a).sum::<f64>() / 0.25;
                if s2 < 1.0 {
                    -c * (1.0 - s2).powi(2)
                } else {
                    0.0
                }
            })
            .map_err(err)?;
            let r = spectral::clr_bound_check(&grid, &w, &v, 0.01, l3).map_err(err)?;
            check(r.slack >= 0.0, || format!("CLR {m}^3 c={c}: slack {}", r.slack))?;
            slacks.push(format!("CLR {m}^3 c={c:.0e}: N={} slack={:.2e}", r.count, r.slack));
        }
        if m == 16 {
            let mut prev = 0;
            for mu in [1.0, 10.0, 30.0, 100.0, 300.0] {
                let r = spectral::counting_function_bound(&grid, &w, mu, l3).map_err(err)?;
                check(r.ordered && r.pointwise_violations == 0, || format!("counting bound order at mu={mu}"))?;
                check(r.count >= prev, || format!("counting function decreased at mu={mu}"))?;
                prev = r.count;
            }
        }
    }
    for dim in [1usize, 2] {
        let (l, q) = constants::hlt_chain_constant(dim, 1.0).map_err(err)?;
        let (domain, h) = if dim == 1 {
            (Domain::interval_union(vec![(-1.0, 1.0)]).map_err(err)?, 1.0 / 128.0)
        } else {
            (Domain::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).map_err(err)?, 1.0 / 12.0)
        };
        let grid = Grid::new(&domain, h).map_err(err)?;
        let w = match dim {
            1 => WeightField::euclidean(grid.clone(), 2.0),
            _ => sphere::weight_field(&domain, grid.clone(), 2.0, &SphereQuadrature::new(2, &[256]).map_err(err)?)
                .map_err(err)?,
        };
        for c in [10.0, 100.0, 1e3, 1e4] {
            let v = Potential::well(grid.clone(), c, &vec![0.0; dim], 0.5).map_err(err)?;
            let r = spectral::hlt_bound_check(&grid, &w, &v, 0.01, 1.0, l).map_err(err)?;
            check(r.slack >= 0.0, || format!("HLT N={dim} c={c}: slack {}", r.slack))?;
            slacks.push(format!("HLT N={dim} c={c:.0e}: moment={:.3e} slack={:.2e} (q*={q:.2})", r.statistic, r.slack));
        }
    }
    for s in &slacks {
        println!("    {s}");
    }
    Ok(format!("{} bound checks, all slacks >= 0", slacks.len()))
}

/// 12. Constant-chain identities.
fn constant_chain() -> Outcome {
    for n in 3..=10 {
        let kn = constants::kn_from_cq(n, constants::cq_upper_bound(constants::sobolev_exponent(n, 2.0).map_err(err)?).map_err(err)?)
            .map_err(err)?;
        let l = constants::clr_constant(n, kn).map_err(err)?;
        let (_, upper) = constants::clr_from_sobolev(kn, n as f64 / 2.0).map_err(err)?;
        check(l == upper, || format!("N={n}: clr_constant {l:e} vs upper bracket {upper:e}"))?;
    }
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for k in 1..=200 {
            let q = 2.0 + 0.05 * k as f64;
            let Ok(theta) = constants::theta_of(n, q) else { continue };
            if !(theta > 0.0 && theta < 1.0) {
                continue;
            }
            let (_, kappa) = constants::gamma_kappa(q, theta).map_err(err)?;
            worst = worst.max((kappa - n as f64 / 2.0).abs());
        }
    }
    check(worst <= 1e-12, || format!("kappa deviates from N/2 by {worst:e}"))?;
    let c6 = constants::cq_upper_bound(6.0).map_err(err)?;
    check(c6 == 64.0, || format!("C_6 bound {c6}"))?;
    let k3 = constants::kn_from_cq(3, c6).map_err(err)?;
    let expected = 3.0 * 2f64.powi(-48);
    check((k3 - expected).abs() <= 1e-15 * expected, || format!("K_3 = {k3:e}"))?;
    Ok(format!("K_3 = {k3:e} = 3*2^-48, L_3 = {:e}, max |kappa - N/2| = {worst:.1e}", constants::clr_constant(3, k3).map_err(err)?))
}

/// Brute-force ∫∏|f_j(x̃_j)| with explicit index bookkeeping.
fn lw_oracle(input: &GnInput) -> f64 {
    let n = input.n;
    let mut s = 0.0;
    for x1 in 0..n {
        for x2 in 0..n {
            for x3 in 0..n {
                let x = [x1, x2, x3];
                let mut prod = 1.0;
                for (j, f) in input.factors.iter().enumerate() {
                    let rest: Vec<usize> = (0..3).filter(|&k| k != j).map(|k| x[k]).collect();
                    prod *= f[rest[0] * n + rest[1]].abs();
                }
                s += prod;
            }
        }
    }
    s * input.h.powi(3)
}

/// 13. Loomis–Whitney product lemma.
fn product_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 16;
    let mut tightest: f64 = 0.0;
    for i in 0..1000 {
        let sparsity: f64 = rng.random_range(0.0..0.9);
        let factors = (0..3)
            .map(|_| {
                (0..n * n)
                    .map(|_| if rng.random::<f64>() < sparsity { 0.0 } else { rng.random_range(0.0..1.0) })
                    .collect()
            })
            .collect();
        let input = GnInput { dim: 3, n, h: rng.random_range(0.01..1.0), factors };
        let r = oned::gn_product_check(&input).map_err(err)?;
        let oracle = lw_oracle(&input);
        check((r.lhs - oracle).abs() <= 1e-12 * oracle.max(1e-300), || format!("instance {i}: lhs {} vs oracle {oracle}", r.lhs))?;
        check(r.lhs <= r.rhs * (1.0 + 1e-12), || format!("instance {i}: lhs {} > rhs {}", r.lhs, r.rhs))?;
        if r.rhs > 0.0 {
            tightest = tightest.max(r.lhs / r.rhs);
        }
    }
    for (a, b) in [(0, 16), (3, 11), (7, 8)] {
        let ind: Vec<f64> = (0..n * n).map(|k| ((a..b).contains(&(k / n)) && (a..b).contains(&(k % n))) as u8 as f64).collect();
        let input = GnInput { dim: 3, n, h: 0.1, factors: vec![ind.clone(), ind.clone(), ind] };
        let r = oned::gn_product_check(&input).map_err(err)?;
        check((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs, || format!("box [{a},{b}): lhs {} rhs {}", r.lhs, r.rhs))?;
    }
    Ok(format!("1000 random instances, max lhs/rhs = {tightest:.4}; box indicators give equality"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("half-space weight recovery", half_space_recovery),
        ("ball-center anchor", ball_center_anchor),
        ("Gamma identity and spherical moments", gamma_identity),
        ("convexity comparison D <= dist", convexity_comparison),
        ("1D key inequality", key_inequality),
        ("p-version of the key inequality", p_version),
        ("discrete Hardy-form nonnegativity", hardy_form_nonnegativity),
        ("1D sharp-constant approach", sharp_constant_approach),
        ("Birman-Schwinger exact equality", birman_schwinger),
        ("inertia oracle", inertia_oracle),
        ("CLR/HLT bound checks", clr_hlt_bounds),
        ("constant-chain identities", constant_chain),
        ("Gagliardo-Nirenberg product lemma", product_inequality),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    let _ = Arc::new(());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
