//! One-dimensional Hardy-remainder inequalities on (−1, 1) and on open
//! subsets of ℝ, empirical constants, and the Loomis–Whitney product bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Shape};
use crate::sphere::gauss_legendre;

/// Finest spacing of the grid used to locate sup |f|.
pub const SUP_GRID: f64 = 1.0 / 4096.0;

/// c·(1 − ((s − center)/radius)²)₊^m
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub m: u32,
    #[serde(default = "one")]
    pub coef: f64,
}

fn one() -> f64 {
    1.0
}

impl Bump {
    fn value_and_slope(&self, s: f64) -> (f64, f64) {
        let u = (s - self.center) / self.radius;
        if u.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let base = 1.0 - u * u;
        let m = self.m as i32;
        let v = self.coef * base.powi(m);
        let d = self.coef * m as f64 * base.powi(m - 1) * (-2.0 * u / self.radius);
        (v, d)
    }
}

/// A test function on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestFunction1D {
    Bumps { bumps: Vec<Bump> },
    /// Piecewise-linear interpolant of equispaced samples on [lo, hi].
    Samples { lo: f64, hi: f64, values: Vec<f64> },
}

impl TestFunction1D {
    pub fn bump(center: f64, radius: f64, m: u32) -> Self {
        TestFunction1D::Bumps { bumps: vec![Bump { center, radius, m, coef: 1.0 }] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction1D::Bumps { bumps } => {
                if bumps.is_empty() {
                    return invalid("a bump function needs at least one bump");
                }
                for b in bumps {
                    if !(b.radius > 0.0 && b.radius.is_finite() && b.center.is_finite() && b.coef.is_finite()) {
                        return invalid(format!("invalid bump {b:?}"));
                    }
                    if b.m < 1 {
                        return invalid("bump exponent m must be >= 1");
                    }
                }
            }
            TestFunction1D::Samples { lo, hi, values } => {
                if !(lo < hi) || values.len() < 3 {
                    return invalid("sampled function needs lo < hi and at least 3 samples");
                }
                if (hi - lo) / (values.len() - 1) as f64 > 2f64.powi(-10) * (1.0 + 1e-12) {
                    return invalid("sample spacing must be at most 2^-10");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return invalid("non-finite sample");
                }
                if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
                    return invalid("samples must vanish at both ends");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, s: f64) -> f64 {
        self.value_and_slope(s).0
    }

    pub fn value_and_slope(&self, s: f64) -> (f64, f64) {
        match self {
            TestFunction1D::Bumps { bumps } => bumps.iter().fold((0.0, 0.0), |(v, d), b| {
                let (bv, bd) = b.value_and_slope(s);
                (v + bv, d + bd)
            }),
            TestFunction1D::Samples { lo, hi, values } => {
                if s <= *lo || s >= *hi {
                    return (0.0, 0.0);
                }
                let step = (hi - lo) / (values.len() - 1) as f64;
                let k = (((s - lo) / step) as usize).min(values.len() - 2);
                let t = (s - lo) / step - k as f64;
                let slope = (values[k + 1] - values[k]) / step;
                (values[k] + t * (values[k + 1] - values[k]), slope)
            }
        }
    }

    /// Closed hull of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction1D::Bumps { bumps } => bumps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x.center - x.radius), b.max(x.center + x.radius))
            }),
            TestFunction1D::Samples { lo, hi, .. } => (*lo, *hi),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            TestFunction1D::Bumps { bumps } => bumps.iter().flat_map(|b| [b.center - b.radius, b.center + b.radius]).collect(),
            TestFunction1D::Samples { lo, hi, values } => {
                let n = values.len() - 1;
                (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
            }
        }
    }

    /// f(a + b·s) expressed on the new variable s (an affine reparametrization).
    pub fn affine(&self, a: f64, b: f64) -> Self {
        match self {
            TestFunction1D::Bumps { bumps } => TestFunction1D::Bumps {
                bumps: bumps
                    .iter()
                    .map(|x| Bump { center: (x.center - a) / b, radius: x.radius / b.abs(), ..*x })
                    .collect(),
            },
            TestFunction1D::Samples { lo, hi, values } => {
                let (l, h) = ((lo - a) / b, (hi - a) / b);
                let mut values = values.clone();
                if b < 0.0 {
                    values.reverse();
                }
                TestFunction1D::Samples { lo: l.min(h), hi: l.max(h), values }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            TestFunction1D::Bumps { bumps } => {
                TestFunction1D::Bumps { bumps: bumps.iter().map(|x| Bump { coef: c * x.coef, ..*x }).collect() }
            }
            TestFunction1D::Samples { lo, hi, values } => {
                TestFunction1D::Samples { lo: *lo, hi: *hi, values: values.iter().map(|v| c * v).collect() }
            }
        }
    }
}

fn components(omega: &Domain) -> Result<&[(f64, f64)]> {
    match omega.shape() {
        Shape::IntervalUnion(iv) => Ok(iv),
        _ => invalid("1D inequalities need an interval-union domain"),
    }
}

fn unit_interval() -> Domain {
    Domain::interval_union(vec![(-1.0, 1.0)]).expect("(-1,1) is a valid domain")
}

/// Nodes, weights and dist(t, Ω^c) for composite Gauss–Legendre over Ω ∩ supp f,
/// with breakpoints at bump ends and component midpoints and geometric grading
/// toward ∂Ω.
#[derive(Debug, Clone)]
struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dist: Vec<f64>,
}

fn quadrature(f: &TestFunction1D, omega: &[(f64, f64)], order: usize, levels: usize) -> Quadrature {
    let (gx, gw) = gauss_legendre(order);
    let (slo, shi) = f.support();
    let mut q = Quadrature { nodes: Vec::new(), weights: Vec::new(), dist: Vec::new() };
    let mut push = |a: f64, b: f64, lo: f64, hi: f64| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in gx.iter().zip(&gw) {
            let t = mid + half * x;
            q.nodes.push(t);
            q.weights.push(half * w);
            q.dist.push((t - lo).min(hi - t));
        }
    };
    for &(lo, hi) in omega {
        let a = lo.max(slo);
        let b = hi.min(shi);
        if !(a < b) {
            continue;
        }
        let mut cuts: Vec<f64> = f.breakpoints().into_iter().filter(|t| *t > a && *t < b).collect();
        let mid = 0.5 * (lo + hi);
        if mid > a && mid < b {
            cuts.push(mid);
        }
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            // Grade toward a boundary endpoint of the component.
            let grade_lo = x0 == lo;
            let grade_hi = x1 == hi;
            let mut pieces = vec![(x0, x1)];
            for _ in 0..levels {
                let mut next = Vec::with_capacity(pieces.len() + 2);
                for (i, &(p0, p1)) in pieces.iter().enumerate() {
                    let first = i == 0 && grade_lo;
                    let last = i + 1 == pieces.len() && grade_hi;
                    if first && last {
                        let m = 0.5 * (p0 + p1);
                        next.push((p0, 0.5 * (p0 + m)));
                        next.push((0.5 * (p0 + m), m));
                        next.push((m, 0.5 * (m + p1)));
                        next.push((0.5 * (m + p1), p1));
                    } else if first || last {
                        let m = 0.5 * (p0 + p1);
                        next.push((p0, m));
                        next.push((m, p1));
                    } else {
                        next.push((p0, p1));
                    }
                }
                pieces = next;
                if !(grade_lo || grade_hi) {
                    break;
                }
            }
            for (p0, p1) in pieces {
                push(p0, p1, lo, hi);
            }
        }
    }
    q
}

/// Values, slopes and weights of f at quadrature nodes, plus the sup data.
#[derive(Debug, Clone)]
struct Sampled {
    quad: Quadrature,
    f: Vec<f64>,
    df: Vec<f64>,
    sup: f64,
    t_star: f64,
    /// f is nonzero at a boundary point of Ω, so the Hardy integral diverges.
    boundary_nonzero: bool,
}

fn sup_abs(f: &TestFunction1D, omega: &[(f64, f64)]) -> (f64, f64) {
    let (slo, shi) = f.support();
    let mut best = (0.0, 0.0);
    for &(lo, hi) in omega {
        let a = lo.max(slo);
        let b = hi.min(shi);
        if !(a < b) {
            continue;
        }
        let n = ((b - a) / SUP_GRID).ceil().max(2.0) as usize;
        let h = (b - a) / n as f64;
        let vals: Vec<f64> = (0..=n).map(|k| f.value(a + k as f64 * h).abs()).collect();
        let (k, &v) = vals.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap();
        let mut cand = (v, a + k as f64 * h);
        if k > 0 && k < n {
            let (f0, f1, f2) = (vals[k - 1], vals[k], vals[k + 1]);
            let den = f0 - 2.0 * f1 + f2;
            if den < 0.0 {
                let t = a + k as f64 * h + 0.5 * h * (f0 - f2) / den;
                let ft = f.value(t).abs();
                if ft > cand.0 {
                    cand = (ft, t);
                }
            }
        }
        if cand.0 > best.0 {
            best = cand;
        }
    }
    best
}

fn sample(f: &TestFunction1D, omega: &[(f64, f64)], order: usize) -> Sampled {
    let quad = quadrature(f, omega, order, 30);
    let (fv, dfv): (Vec<f64>, Vec<f64>) = quad.nodes.iter().map(|&t| f.value_and_slope(t)).unzip();
    let (sup, t_star) = sup_abs(f, omega);
    let boundary_nonzero = omega.iter().any(|&(lo, hi)| f.value(lo) != 0.0 || f.value(hi) != 0.0);
    Sampled { quad, f: fv, df: dfv, sup, t_star, boundary_nonzero }
}

fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

impl Sampled {
    fn integral(&self, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let mut s = crate::special::CompensatedSum::new();
        for k in 0..self.f.len() {
            s.add(self.quad.weights[k] * g(self.f[k], self.df[k], self.quad.dist[k]));
        }
        s.value()
    }

    /// ∫(|f′|^p − ((p−1)/p)^p |f|^p / d^p)
    fn p_form(&self, p: f64) -> f64 {
        if self.boundary_nonzero {
            return f64::NEG_INFINITY;
        }
        let c = ((p - 1.0) / p).powf(p);
        let c = if p == 2.0 { 0.25 } else { c };
        self.integral(|v, d, dist| pow_abs(d, p) - c * pow_abs(v / dist, p))
    }

    fn lq(&self, q: f64) -> f64 {
        self.integral(|v, _, _| pow_abs(v, q))
    }
}

/// A ratio together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratio {
    pub ratio: f64,
    /// Where |f| attains its sup.
    pub t_star: f64,
    pub form: f64,
    pub sup: f64,
}

fn check_q(q: f64, min: f64) -> Result<()> {
    if !(q >= min && q.is_finite()) {
        return invalid(format!("q must be >= {min}, got {q}"));
    }
    Ok(())
}

fn ratio_from(s: &Sampled, p: f64, q: f64) -> Result<Ratio> {
    let form = s.p_form(p);
    if !(form > 0.0) {
        return Err(Error::NonpositiveForm { value: form });
    }
    let exponent = q * (p - 1.0) + p;
    let ratio = s.sup.powf(exponent) / (form * s.lq(q).powf(p - 1.0));
    Ok(Ratio { ratio, t_star: s.t_star, form, sup: s.sup })
}

const ORDER: usize = 16;

/// max|f|^{q+2} / (∫(f′² − f²/(4(1−|s|)²)) · ∫|f|^q) on (−1, 1).
pub fn key_ratio(f: &TestFunction1D, q: f64) -> Result<Ratio> {
    keyp_ratio(f, 2.0, q)
}

/// key_ratio with weight 1/(4 dist(t, Ω^c)²) on an interval union; f is restricted to Ω.
pub fn keycor_ratio(f: &TestFunction1D, omega: &Domain, q: f64) -> Result<Ratio> {
    check_q(q, 2.0)?;
    f.validate()?;
    let s = sample(f, components(omega)?, ORDER);
    ratio_from(&s, 2.0, q)
}

/// sup|f|^q / (t[f] · (∫f²)^{2/(q−2)} · (∫|f|^q)^{(q−4)/(q−2)}) for q ≥ 4.
pub fn keycor2_ratio(f: &TestFunction1D, omega: &Domain, q: f64) -> Result<Ratio> {
    check_q(q, 4.0)?;
    f.validate()?;
    let s = sample(f, components(omega)?, ORDER);
    let form = s.p_form(2.0);
    if !(form > 0.0) {
        return Err(Error::NonpositiveForm { value: form });
    }
    let den = form * s.lq(2.0).powf(2.0 / (q - 2.0)) * s.lq(q).powf((q - 4.0) / (q - 2.0));
    Ok(Ratio { ratio: s.sup.powf(q) / den, t_star: s.t_star, form, sup: s.sup })
}

/// max|f|^{q(p−1)+p} / (∫(|f′|^p − ((p−1)/p)^p |f|^p/(1−|s|)^p) · (∫|f|^q)^{p−1}) on (−1, 1).
pub fn keyp_ratio(f: &TestFunction1D, p: f64, q: f64) -> Result<Ratio> {
    if !(p >= 2.0) {
        return invalid(format!("p must be >= 2, got {p}"));
    }
    check_q(q, p)?;
    f.validate()?;
    let omega = unit_interval();
    let s = sample(f, components(&omega)?, ORDER);
    ratio_from(&s, p, q)
}

/// Ratios for several q sharing one sampling of f.
pub fn keyp_ratios(f: &TestFunction1D, p: f64, qs: &[f64]) -> Result<Vec<Result<Ratio>>> {
    if !(p >= 2.0) {
        return invalid(format!("p must be >= 2, got {p}"));
    }
    f.validate()?;
    let omega = unit_interval();
    let s = sample(f, components(&omega)?, ORDER);
    Ok(qs.iter().map(|&q| check_q(q, p).and_then(|_| ratio_from(&s, p, q))).collect())
}

/// (q + 2)², the upper bound for C_q.
pub fn key_bound(q: f64) -> f64 {
    (q + 2.0) * (q + 2.0)
}

/// (q + 2)² / (4(q + 1))
pub fn alpha_constant(q: f64) -> Result<f64> {
    check_q(q, 2.0)?;
    Ok((q + 2.0) * (q + 2.0) / (4.0 * (q + 1.0)))
}

/// A span of bumps on (−1, 1). Entry 0 is the symmetric bump (1 − s²)²;
/// the rest are m = 3 bumps with centers spread over (−0.9, 0.9).
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFamily {
    pub basis: Vec<Bump>,
}

impl BumpFamily {
    pub fn standard(dim: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("family dimension must be positive");
        }
        let mut basis = vec![Bump { center: 0.0, radius: 1.0, m: 2, coef: 1.0 }];
        for k in 1..dim {
            let a = if dim == 2 { 0.5 } else { -0.9 + 1.8 * (k - 1) as f64 / (dim - 2) as f64 };
            basis.push(Bump { center: a, radius: (1.0 - a.abs()).min(0.6), m: 3, coef: 1.0 });
        }
        Ok(BumpFamily { basis })
    }

    pub fn combine(&self, coefs: &[f64]) -> TestFunction1D {
        TestFunction1D::Bumps {
            bumps: self.basis.iter().zip(coefs).map(|(b, c)| Bump { coef: *c, ..*b }).collect(),
        }
    }
}

/// Basis functions tabulated once for fast ratio evaluation.
struct Tabulated {
    quad: Quadrature,
    f: Vec<Vec<f64>>,
    df: Vec<Vec<f64>>,
    grid: Vec<Vec<f64>>,
    grid_t: Vec<f64>,
}

impl Tabulated {
    fn new(family: &BumpFamily) -> Self {
        let omega = [(-1.0, 1.0)];
        let all = family.combine(&vec![1.0; family.basis.len()]);
        let quad = quadrature(&all, &omega, ORDER, 30);
        let n = (2.0 / SUP_GRID) as usize;
        let grid_t: Vec<f64> = (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect();
        let mut f = Vec::new();
        let mut df = Vec::new();
        let mut grid = Vec::new();
        for b in &family.basis {
            let (v, d): (Vec<f64>, Vec<f64>) = quad.nodes.iter().map(|&t| b.value_and_slope(t)).unzip();
            f.push(v);
            df.push(d);
            grid.push(grid_t.iter().map(|&t| b.value_and_slope(t).0).collect());
        }
        Tabulated { quad, f, df, grid, grid_t }
    }

    fn ratio(&self, c: &[f64], p: f64, q: f64) -> f64 {
        let nq = self.quad.nodes.len();
        let mut form = 0.0;
        let mut lq = 0.0;
        let coef = if p == 2.0 { 0.25 } else { ((p - 1.0) / p).powf(p) };
        for k in 0..nq {
            let (mut v, mut d) = (0.0, 0.0);
            for j in 0..c.len() {
                v += c[j] * self.f[j][k];
                d += c[j] * self.df[j][k];
            }
            let w = self.quad.weights[k];
            form += w * (pow_abs(d, p) - coef * pow_abs(v / self.quad.dist[k], p));
            lq += w * pow_abs(v, q);
        }
        if !(form > 0.0) {
            return f64::NEG_INFINITY;
        }
        let sup = (0..self.grid_t.len())
            .map(|k| (0..c.len()).map(|j| c[j] * self.grid[j][k]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        sup.powf(q * (p - 1.0) + p) / (form * lq.powf(p - 1.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub coefficients: Vec<f64>,
    /// Ratio of the incumbent, recomputed with the full sup refinement.
    pub ratio: f64,
    pub restart: usize,
    /// Best ratio per restart (−∞ when the restart never found a positive form).
    pub per_restart: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { restarts: 20, iterations: 60, seed: 0 }
    }
}

fn normalize(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= n);
}

/// Projected gradient ascent of keyp_ratio over unit-norm coefficient vectors.
///
/// Restart r draws its start from a generator seeded by (seed, r), so the
/// result does not depend on thread scheduling; ties go to the lowest restart.
pub fn worst_case_search(family: &BumpFamily, p: f64, q: f64, opts: &SearchOptions) -> Result<SearchResult> {
    if !(p >= 2.0) {
        return invalid(format!("p must be >= 2, got {p}"));
    }
    check_q(q, p)?;
    if opts.restarts == 0 {
        return invalid("need at least one restart");
    }
    let tab = Tabulated::new(family);
    let m = family.basis.len();
    let runs: Vec<(f64, Vec<f64>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let mut c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            if r == 0 || c.iter().all(|x| *x == 0.0) {
                c = vec![0.0; m];
                c[0] = 1.0;
            }
            normalize(&mut c);
            let mut val = tab.ratio(&c, p, q);
            let mut step = 0.1;
            for _ in 0..opts.iterations {
                if m == 1 || !val.is_finite() {
                    break;
                }
                let h = 1e-6;
                let mut g = vec![0.0; m];
                for j in 0..m {
                    let mut cp = c.clone();
                    cp[j] += h;
                    let mut cm = c.clone();
                    cm[j] -= h;
                    g[j] = (tab.ratio(&cp, p, q) - tab.ratio(&cm, p, q)) / (2.0 * h);
                }
                // Project onto the tangent space of the sphere.
                let radial: f64 = g.iter().zip(&c).map(|(a, b)| a * b).sum();
                g.iter_mut().zip(&c).for_each(|(a, b)| *a -= radial * b);
                let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(gn > 0.0) || !gn.is_finite() {
                    break;
                }
                let mut improved = false;
                for _ in 0..30 {
                    let mut cand: Vec<f64> = c.iter().zip(&g).map(|(a, b)| a + step * b / gn).collect();
                    normalize(&mut cand);
                    let v = tab.ratio(&cand, p, q);
                    if v > val {
                        c = cand;
                        val = v;
                        step = (step * 2.0).min(1.0);
                        improved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            (val, c)
        })
        .collect();
    let per_restart: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let mut best: Option<usize> = None;
    for (r, (v, _)) in runs.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| *v > runs[b].0) {
            best = Some(r);
        }
    }
    let b = best.ok_or(Error::SearchFailed)?;
    let coefficients = runs[b].1.clone();
    let ratio = keyp_ratio(&family.combine(&coefficients), p, q)?.ratio;
    Ok(SearchResult { coefficients, ratio, restart: b, per_restart })
}

/// Loomis–Whitney data: N factors, factor j sampled on the n^{N−1} grid of
/// the variables other than x_j (increasing axis order, row-major), spacing h.
#[derive(Debug, Clone, PartialEq)]
pub struct GnInput {
    pub dim: usize,
    pub n: usize,
    pub h: f64,
    pub factors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnReport {
    /// ‖∏ f_j(x̃_j)‖_{L¹(ℝᴺ)}
    pub lhs: f64,
    /// ∏ ‖f_j‖_{L^{N−1}(ℝ^{N−1})}
    pub rhs: f64,
}

/// Evaluates both sides of ∫∏|f_j(x̃_j)| ≤ ∏‖f_j‖_{N−1}.
pub fn gn_product_check(input: &GnInput) -> Result<GnReport> {
    let GnInput { dim, n, h, factors } = input;
    let (dim, n, h) = (*dim, *n, *h);
    if !(dim == 2 || dim == 3) {
        return invalid(format!("the product lemma is checked for N = 2, 3; got {dim}"));
    }
    if factors.len() != dim {
        return Err(Error::GridMismatch(format!("{} factors for N = {dim}", factors.len())));
    }
    let len = n.pow(dim as u32 - 1);
    for (j, f) in factors.iter().enumerate() {
        if f.len() != len {
            return Err(Error::GridMismatch(format!("factor {j} has {} samples, expected {len}", f.len())));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return invalid(format!("factor {j} has a non-finite sample"));
        }
    }
    if !(h > 0.0) {
        return invalid("spacing must be positive");
    }
    let r = (dim - 1) as f64;
    let rhs: f64 = factors
        .iter()
        .map(|f| (f.iter().map(|v| v.abs().powf(r)).sum::<f64>() * h.powi(dim as i32 - 1)).powf(1.0 / r))
        .product();
    let lhs = if dim == 2 {
        // ∫∫ |f₁(x₂) f₂(x₁)| factorizes.
        factors[0].iter().map(|v| v.abs()).sum::<f64>() * factors[1].iter().map(|v| v.abs()).sum::<f64>() * h * h
    } else {
        let (f1, f2, f3) = (&factors[0], &factors[1], &factors[2]);
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = f3[i * n + j].abs();
                if a == 0.0 {
                    continue;
                }
                let row: f64 = (0..n).map(|k| f1[j * n + k].abs() * f2[i * n + k].abs()).sum();
                s += a * row;
            }
        }
        s * h * h * h
    };
    Ok(GnReport { lhs, rhs })
}

/// A named corpus member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub id: String,
    pub function: TestFunction1D,
}

/// Random corpus recipe: symmetric bumps, shifted/scaled bumps and mixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCorpus {
    pub count: usize,
    pub seed: u64,
}

/// Deterministic corpus on (−1, 1) with supports inside [−1, 1].
pub fn generate_corpus(spec: &RandomCorpus) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for m in 2..=4u32 {
        if out.len() < spec.count {
            out.push(CorpusEntry { id: format!("sym-m{m}"), function: TestFunction1D::bump(0.0, 1.0, m) });
        }
    }
    let random_bump = |rng: &mut ChaCha8Rng| -> Bump {
        let center: f64 = rng.random_range(-0.95..0.95);
        let room = 1.0 - center.abs();
        let radius = room * rng.random_range(0.05..=1.0);
        Bump { center, radius, m: rng.random_range(2..=4), coef: 1.0 }
    };
    let mut k = 0;
    while out.len() < spec.count {
        let function = if k % 2 == 0 {
            TestFunction1D::Bumps { bumps: vec![random_bump(&mut rng)] }
        } else {
            let terms = rng.random_range(2..=5);
            TestFunction1D::Bumps {
                bumps: (0..terms)
                    .map(|_| Bump { coef: rng.random_range(-1.0..1.0), ..random_bump(&mut rng) })
                    .collect(),
            }
        };
        out.push(CorpusEntry { id: format!("rnd-{k}"), function });
        k += 1;
    }
    out
}

/// Corpus file:
///
/// ```json
/// { "random": { "count": 100, "seed": 7 },
///   "functions": [ { "id": "f", "bumps": [ { "center": 0, "radius": 1, "m": 2 } ] },
///                  { "id": "g", "lo": -0.5, "hi": 0.5, "values": [0, ..., 0] } ] }
/// ```
pub fn parse_corpus_spec(text: &str) -> Result<Vec<CorpusEntry>> {
    let perr = |path: String, reason: String| Error::Parse { path, reason };
    let root: Value = serde_json::from_str(text).map_err(|e| perr("$".into(), e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| perr("$".into(), "expected an object".into()))?;
    for key in obj.keys() {
        if key != "random" && key != "functions" {
            return Err(perr(format!("$.{key}"), "unknown field".into()));
        }
    }
    let mut out = Vec::new();
    if let Some(r) = obj.get("random") {
        let count = r
            .get("count")
            .and_then(Value::as_u64)
            .ok_or_else(|| perr("$.random.count".into(), "expected a nonnegative integer".into()))?;
        if count > 1_000_000 {
            return Err(perr("$.random.count".into(), "corpus too large".into()));
        }
        let seed = match r.get("seed") {
            None => 0,
            Some(s) => s.as_u64().ok_or_else(|| perr("$.random.seed".into(), "expected a nonnegative integer".into()))?,
        };
        out.extend(generate_corpus(&RandomCorpus { count: count as usize, seed }));
    }
    if let Some(fs) = obj.get("functions") {
        let arr = fs.as_array().ok_or_else(|| perr("$.functions".into(), "expected an array".into()))?;
        for (i, v) in arr.iter().enumerate() {
            let path = format!("$.functions[{i}]");
            let id = v
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("{path}.id"), "expected a string".into()))?
                .to_string();
            let mut body = v.clone();
            if let Some(o) = body.as_object_mut() {
                o.remove("id");
            }
            let function: TestFunction1D =
                serde_json::from_value(body).map_err(|e| perr(path.clone(), e.to_string()))?;
            function.validate().map_err(|e| perr(path.clone(), e.to_string()))?;
            out.push(CorpusEntry { id, function });
        }
    }
    if out.is_empty() {
        return Err(perr("$".into(), "corpus is empty".into()));
    }
    Ok(out)
}

/// The corpus used when none is given: 100 members, seed 0.
pub fn default_corpus() -> Vec<CorpusEntry> {
    generate_corpus(&RandomCorpus { count: 100, seed: 0 })
}
