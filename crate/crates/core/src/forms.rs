//! Grid functions, Hardy–Sobolev–Maz'ya forms, quotients and their minimization.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{random, Domain};
use crate::grid::Grid;
use crate::linalg::{ldlt_inertia, SparseSymmetric};
use crate::sphere::WeightField;

/// Which weight enters the Hardy term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyWeight {
    Davies,
    Euclidean,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormParams {
    pub p: f64,
    /// The Hardy term is multiplied by 1 − ε.
    pub epsilon: f64,
    pub hardy: HardyWeight,
}

impl Default for FormParams {
    fn default() -> Self {
        FormParams { p: 2.0, epsilon: 0.0, hardy: HardyWeight::Davies }
    }
}

impl FormParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return invalid(format!("p must be >= 1, got {}", self.p));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return invalid(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
        }
        Ok(())
    }

    /// (1 − ε)((p − 1)/p)^p, or 0 without a Hardy term.
    pub fn hardy_coefficient(&self) -> f64 {
        match self.hardy {
            HardyWeight::None => 0.0,
            _ => (1.0 - self.epsilon) * ((self.p - 1.0) / self.p).powf(self.p),
        }
    }
}

/// Node values on a grid, zero away from the active nodes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

/// Equal when defined on the same grid with equal values.
impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) && self.values == other.values
    }
}

impl GridFunction {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        GridFunction { grid, values: vec![0.0; n] }
    }

    /// Checks finiteness and support on active nodes.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return invalid(format!("non-finite value at node {i}"));
            }
            if *v != 0.0 && !grid.is_active(i) {
                return invalid(format!("nonzero value at node {i} outside the active set"));
            }
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at the active nodes.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        let mut x = vec![0.0; grid.dim()];
        for &i in grid.active_nodes() {
            grid.coords_into(i, &mut x);
            values[i] = f(&x);
        }
        GridFunction { grid, values }
    }

    /// Builds from values listed in active-node order.
    pub fn from_active(grid: Arc<Grid>, active: &[f64]) -> Result<Self> {
        if active.len() != grid.active_nodes().len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} active nodes",
                active.len(),
                grid.active_nodes().len()
            )));
        }
        let mut values = vec![0.0; grid.len()];
        for (&i, &v) in grid.active_nodes().iter().zip(active) {
            values[i] = v;
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn active_values(&self) -> Vec<f64> {
        self.grid.active_nodes().iter().map(|&i| self.values[i]).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }
}

fn same_grid(u: &GridFunction, w: &WeightField) -> Result<()> {
    if Arc::ptr_eq(&u.grid, &w.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch("function and weight live on different grids".into()))
    }
}

/// Σ over cells of |∇u|^p hᴺ with forward differences.
pub fn gradient_power_integral(u: &GridFunction, p: f64) -> f64 {
    let g = &u.grid;
    let dim = g.dim();
    let h = g.spacing();
    let mut total = 0.0;
    'cells: for c in 0..g.len() {
        let uc = u.values[c];
        let mut s = 0.0;
        for k in 0..dim {
            let Some(f) = g.forward(c, k) else { continue 'cells };
            let d = (u.values[f] - uc) / h;
            s += d * d;
        }
        if s > 0.0 {
            total += if p == 2.0 { s } else { s.powf(0.5 * p) };
        }
    }
    total * g.cell_volume()
}

/// (Σ |uᵢ|^q hᴺ)^{1/q}
pub fn lq_norm(u: &GridFunction, q: f64) -> f64 {
    let s: f64 = u.values.iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(q)).sum();
    (s * u.grid.cell_volume()).powf(1.0 / q)
}

/// Σ |uᵢ|^p / w(xᵢ)^p hᴺ over the support of u.
pub fn hardy_integral(u: &GridFunction, w: &WeightField, p: f64) -> Result<f64> {
    same_grid(u, w)?;
    let mut s = 0.0;
    for (i, v) in u.values.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let wi = w.get(i).ok_or_else(|| Error::MissingWeight { node: i, point: u.grid.coords(i) })?;
        s += (v.abs() / wi).powf(p);
    }
    Ok(s * u.grid.cell_volume())
}

/// ∫|∇u|^p − (1−ε)((p−1)/p)^p ∫|u|^p/w^p, never clamped.
pub fn hsm_form(u: &GridFunction, w: &WeightField, params: &FormParams) -> Result<f64> {
    params.validate()?;
    let grad = gradient_power_integral(u, params.p);
    if params.hardy == HardyWeight::None {
        return Ok(grad);
    }
    Ok(grad - params.hardy_coefficient() * hardy_integral(u, w, params.p)?)
}

/// hsm_form(u) / ‖u‖_q^p
pub fn hsm_quotient(u: &GridFunction, w: &WeightField, params: &FormParams, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return invalid(format!("q must be >= 1, got {q}"));
    }
    let norm = lq_norm(u, q);
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(hsm_form(u, w, params)? / norm.powf(params.p))
}

/// t[u]^θ ‖u‖₂^{2(1−θ)} / ‖u‖_q², θ = (N/2)(1 − 2/q), for N = 1, 2.
pub fn interpolation_quotient(u: &GridFunction, w: &WeightField, params: &FormParams, q: f64) -> Result<f64> {
    let dim = u.grid.dim();
    if dim > 2 {
        return invalid(format!("interpolation quotient is for N = 1, 2; got {dim}"));
    }
    let theta = crate::constants::theta_of(dim, q)?;
    let nq = lq_norm(u, q);
    if nq == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let t = hsm_form(u, w, params)?;
    if t < 0.0 {
        return Err(Error::NegativeForm { value: t });
    }
    let n2 = lq_norm(u, 2.0);
    Ok(t.powf(theta) * n2.powf(2.0 * (1.0 - theta)) / (nq * nq))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HhlReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// lhs = t[u], rhs = K |Ω|^{−2/N} ‖u‖₂² with |Ω| by node counting.
pub fn hhl_check(u: &GridFunction, w: &WeightField, params: &FormParams, k: f64) -> Result<HhlReport> {
    let dim = u.grid.dim();
    if dim < 3 {
        return invalid(format!("the HHL inequality needs N >= 3, got {dim}"));
    }
    let lhs = hsm_form(u, w, params)?;
    let measure = u.grid.domain_measure();
    let n2 = lq_norm(u, 2.0);
    let rhs = k * measure.powf(-2.0 / dim as f64) * n2 * n2;
    Ok(HhlReport { lhs, rhs, slack: lhs - rhs })
}

/// Gradient of t[u] with respect to the active values.
fn form_gradient(u: &GridFunction, w: &WeightField, params: &FormParams) -> Result<Vec<f64>> {
    let g = &u.grid;
    let dim = g.dim();
    let h = g.spacing();
    let p = params.p;
    let vol = g.cell_volume();
    let mut full = vec![0.0; g.len()];
    let mut diffs = vec![0.0; dim];
    let mut fwd = vec![0usize; dim];
    'cells: for c in 0..g.len() {
        let mut s = 0.0;
        for k in 0..dim {
            let Some(f) = g.forward(c, k) else { continue 'cells };
            fwd[k] = f;
            diffs[k] = (u.values[f] - u.values[c]) / h;
            s += diffs[k] * diffs[k];
        }
        if s == 0.0 {
            continue;
        }
        // ∂/∂d_k of s^{p/2} = p s^{p/2−1} d_k
        let factor = p * s.powf(0.5 * p - 1.0) * vol / h;
        for k in 0..dim {
            full[fwd[k]] += factor * diffs[k];
            full[c] -= factor * diffs[k];
        }
    }
    let coef = params.hardy_coefficient();
    if coef != 0.0 {
        same_grid(u, w)?;
        for &i in g.active_nodes() {
            let v = u.values[i];
            if v == 0.0 {
                continue;
            }
            let wi = w.get(i).ok_or_else(|| Error::MissingWeight { node: i, point: g.coords(i) })?;
            full[i] -= coef * p * v.abs().powf(p - 2.0) * v / wi.powf(p) * vol;
        }
    }
    Ok(g.active_nodes().iter().map(|&i| full[i]).collect())
}

/// Gradient of `hsm_quotient` with respect to the active values.
pub fn hsm_quotient_gradient(u: &GridFunction, w: &WeightField, params: &FormParams, q: f64) -> Result<Vec<f64>> {
    params.validate()?;
    let vol = u.grid.cell_volume();
    let gsum: f64 = u.values.iter().map(|v| v.abs().powf(q)).sum::<f64>() * vol;
    if gsum == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let t = hsm_form(u, w, params)?;
    let df = form_gradient(u, w, params)?;
    let scale = gsum.powf(-params.p / q);
    let ratio = params.p / q * t / gsum;
    Ok(u.grid
        .active_nodes()
        .iter()
        .zip(df)
        .map(|(&i, d)| {
            let v = u.values[i];
            let dg = if v == 0.0 { 0.0 } else { q * v.abs().powf(q - 2.0) * v * vol };
            scale * (d - ratio * dg)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub quotient: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub best: GridFunction,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentOptions {
    pub iterations: usize,
    /// First trial step, relative to ‖u‖₂ of the active values.
    pub initial_step: f64,
    pub max_halvings: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { iterations: 200, initial_step: 0.1, max_halvings: 40 }
    }
}

/// Objective handled by the descent loop.
trait Objective {
    fn value(&self, u: &GridFunction) -> Result<f64>;
    fn gradient(&self, u: &GridFunction) -> Result<Vec<f64>>;
    /// Degree of homogeneity normalization.
    fn normalize(&self, u: &GridFunction) -> GridFunction;
}

struct Quotient<'a> {
    w: &'a WeightField,
    params: FormParams,
    q: f64,
}

impl Objective for Quotient<'_> {
    fn value(&self, u: &GridFunction) -> Result<f64> {
        hsm_quotient(u, self.w, &self.params, self.q)
    }
    fn gradient(&self, u: &GridFunction) -> Result<Vec<f64>> {
        hsm_quotient_gradient(u, self.w, &self.params, self.q)
    }
    fn normalize(&self, u: &GridFunction) -> GridFunction {
        u.scaled(1.0 / lq_norm(u, self.q))
    }
}

struct HardyRatio<'a> {
    w: &'a WeightField,
}

impl Objective for HardyRatio<'_> {
    fn value(&self, u: &GridFunction) -> Result<f64> {
        hardy_ratio(u, self.w)
    }
    fn gradient(&self, u: &GridFunction) -> Result<Vec<f64>> {
        // R = G/H, ∇R = (∇G − R ∇H)/H
        let hi = hardy_integral(u, self.w, 2.0)? / 4.0;
        let r = gradient_power_integral(u, 2.0) / hi;
        let plain = FormParams { p: 2.0, epsilon: 0.0, hardy: HardyWeight::None };
        let dg = form_gradient(u, self.w, &plain)?;
        let vol = u.grid.cell_volume();
        Ok(u.grid
            .active_nodes()
            .iter()
            .zip(dg)
            .map(|(&i, d)| {
                let wi = self.w.get(i).unwrap_or(f64::INFINITY);
                let dh = 0.5 * u.values[i] / (wi * wi) * vol;
                (d - r * dh) / hi
            })
            .collect())
    }
    fn normalize(&self, u: &GridFunction) -> GridFunction {
        u.scaled(1.0 / lq_norm(u, 2.0))
    }
}

fn descend(obj: &dyn Objective, init: &GridFunction, opts: &DescentOptions) -> Result<Minimized> {
    let norm0 = init.active_values().iter().map(|v| v * v).sum::<f64>();
    if norm0 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut u = obj.normalize(init);
    let mut value = obj.value(&u)?;
    if !value.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let mut trace = vec![TraceRow { iteration: 0, quotient: value, step: 0.0 }];
    let mut step = opts.initial_step;
    let active = u.grid.active_nodes().to_vec();
    for it in 1..=opts.iterations {
        let g = obj.gradient(&u)?;
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !gnorm.is_finite() {
            return Err(Error::NonFinite { iteration: it });
        }
        if gnorm == 0.0 {
            break;
        }
        let unorm = active.iter().map(|&i| u.values[i] * u.values[i]).sum::<f64>().sqrt();
        let mut accepted = None;
        let mut s = (2.0 * step).min(1.0);
        for _ in 0..=opts.max_halvings {
            let mut values = u.values.clone();
            for (&i, gi) in active.iter().zip(&g) {
                values[i] -= s * unorm * gi / gnorm;
            }
            let cand = GridFunction { grid: u.grid.clone(), values };
            let cn = obj.normalize(&cand);
            match obj.value(&cn) {
                Ok(v) if v.is_finite() && v < value => {
                    accepted = Some((cn, v));
                    break;
                }
                Ok(v) if !v.is_finite() => return Err(Error::NonFinite { iteration: it }),
                Err(Error::ZeroNorm) | Ok(_) => s *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((next, v)) = accepted else { break };
        u = next;
        value = v;
        step = s;
        trace.push(TraceRow { iteration: it, quotient: value, step: s });
    }
    Ok(Minimized { best: u, trace })
}

/// Normalized-gradient descent on `hsm_quotient` with backtracking.
///
/// Each accepted step strictly lowers the quotient of the renormalized
/// iterate (‖u‖_q = 1), so the trace is non-increasing. The run stops early
/// when 40 halvings fail to decrease.
pub fn minimize_quotient(
    init: &GridFunction,
    w: &WeightField,
    params: &FormParams,
    q: f64,
    opts: &DescentOptions,
) -> Result<Minimized> {
    params.validate()?;
    descend(&Quotient { w, params: *params, q }, init, opts)
}

/// ∫|∇u|² / ∫u²/(4w²); a value ≥ 1 is the Hardy inequality with constant ¼.
pub fn hardy_ratio(u: &GridFunction, w: &WeightField) -> Result<f64> {
    let hi = hardy_integral(u, w, 2.0)? / 4.0;
    if hi == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(gradient_power_integral(u, 2.0) / hi)
}

/// Gradient descent on `hardy_ratio`, normalized in L².
pub fn minimize_hardy_ratio(init: &GridFunction, w: &WeightField, opts: &DescentOptions) -> Result<Minimized> {
    descend(&HardyRatio { w }, init, opts)
}

/// Exact minimum of `hardy_ratio` over grid functions: the smallest λ with
/// K − λM singular, where K is the gradient stiffness and M = diag(1/(4w²)).
/// Found by bisection on the inertia of K − λM.
pub fn hardy_ratio_minimum(w: &WeightField, rel_tol: f64) -> Result<f64> {
    let grid = &w.grid;
    let lap = crate::spectral::dirichlet_laplacian(grid);
    let mass: Vec<f64> = grid
        .active_nodes()
        .iter()
        .map(|&i| {
            w.get(i)
                .map(|wi| 0.25 / (wi * wi))
                .ok_or_else(|| Error::MissingWeight { node: i, point: grid.coords(i) })
        })
        .collect::<Result<_>>()?;
    if mass.is_empty() {
        return invalid("grid has no active nodes");
    }
    let count_below = |lambda: f64| -> Result<usize> {
        let shifted = SparseSymmetric::from_rows(
            (0..lap.dim())
                .map(|r| {
                    let mut row: Vec<(usize, f64)> = lap.row(r).collect();
                    row.push((r, -lambda * mass[r]));
                    row
                })
                .collect(),
        );
        Ok(ldlt_inertia(&shifted, 0.0)?.negative)
    };
    // Rayleigh quotient of any vector bounds the minimum from above.
    let ones = vec![1.0; mass.len()];
    let mut hi = lap.quadratic_form(&ones) / mass.iter().sum::<f64>();
    let mut lo = 0.0;
    while count_below(hi)? == 0 {
        hi *= 2.0;
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        match count_below(mid) {
            Ok(0) => lo = mid,
            Ok(_) => hi = mid,
            // An exactly singular pencil sits on an eigenvalue.
            Err(Error::FactorizationBreakdown { .. }) => return Ok(mid),
            Err(e) => return Err(e),
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radial or tensor (1 − s²)₊^m bump, or a linear mixture of bumps.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Radial { center: Vec<f64>, radius: f64, m: u32 },
    Tensor { center: Vec<f64>, half_widths: Vec<f64>, m: u32 },
    Mixture { terms: Vec<(f64, Profile)> },
}

impl Profile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Radial { center, radius, m } => {
                let s2: f64 = x.iter().zip(center).map(|(a, c)| ((a - c) / radius).powi(2)).sum();
                if s2 < 1.0 {
                    (1.0 - s2).powi(*m as i32)
                } else {
                    0.0
                }
            }
            Profile::Tensor { center, half_widths, m } => {
                let mut v = 1.0;
                for ((a, c), r) in x.iter().zip(center).zip(half_widths) {
                    let s = (a - c) / r;
                    if s.abs() >= 1.0 {
                        return 0.0;
                    }
                    v *= (1.0 - s * s).powi(*m as i32);
                }
                v
            }
            Profile::Mixture { terms } => terms.iter().map(|(c, p)| c * p.eval(x)).sum(),
        }
    }

    pub fn sample(&self, grid: Arc<Grid>) -> GridFunction {
        GridFunction::from_fn(grid, |x| self.eval(x))
    }
}

/// Reproducible smooth test functions supported in `domain`: the bump fitted
/// to the bounding box (for boxes and intervals), then shifted and scaled
/// radial/tensor bumps and random mixtures.
pub fn smooth_corpus(domain: &Domain, count: usize, seed: u64) -> Vec<Profile> {
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let (lo, hi) = domain.bounding_box();
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    if matches!(domain.shape(), crate::geometry::Shape::AxisBox { .. })
        || matches!(domain.shape(), crate::geometry::Shape::IntervalUnion(iv) if iv.len() == 1)
    {
        for m in 2..=4 {
            out.push(Profile::Tensor { center: center.clone(), half_widths: half.clone(), m });
        }
    }
    let bump = |rng: &mut ChaCha8Rng| -> Profile {
        let c = random::interior_point(rng, domain, 0.0);
        let d = domain.boundary_distance_unchecked(&c);
        let m = rng.random_range(2..=4);
        let r = d * rng.random_range(0.3..1.0);
        if rng.random_bool(0.5) {
            Profile::Radial { center: c, radius: r, m }
        } else {
            let hw = r / (dim as f64).sqrt();
            Profile::Tensor { center: c, half_widths: vec![hw; dim], m }
        }
    };
    while out.len() < count {
        if out.len() % 3 == 2 {
            let k = rng.random_range(2..=4);
            let terms = (0..k).map(|_| (rng.random_range(-1.0..1.0), bump(&mut rng))).collect();
            out.push(Profile::Mixture { terms });
        } else {
            out.push(bump(&mut rng));
        }
    }
    out.truncate(count);
    out
}
