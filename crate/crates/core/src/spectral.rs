//! Discrete Schrödinger operators −Δ − (1−ε)/(4D²) + V on the active nodes
//! of a grid, eigenvalue counting and bound checks.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::linalg::{ldlt_inertia, symmetric_eigenvalues, SparseSymmetric};
use crate::sphere::WeightField;

/// Dense eigensolves are used as a fallback up to this many unknowns.
pub const DENSE_LIMIT: usize = 3000;

/// Potential values on the nodes of a grid (only active nodes are read).
#[derive(Debug, Clone)]
pub struct Potential {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

/// Equal when defined on the same grid with equal values.
impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) && self.values == other.values
    }
}

impl Potential {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} potential values for {} nodes", values.len(), grid.len())));
        }
        for &i in grid.active_nodes() {
            if !values[i].is_finite() {
                return Err(Error::MissingPotential { node: i });
            }
        }
        Ok(Potential { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        let mut x = vec![0.0; grid.dim()];
        for &i in grid.active_nodes() {
            grid.coords_into(i, &mut x);
            values[i] = f(&x);
        }
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Result<Self> {
        Self::from_fn(grid, |_| c)
    }

    /// −depth on the open ball B(center, radius), 0 elsewhere.
    pub fn well(grid: Arc<Grid>, depth: f64, center: &[f64], radius: f64) -> Result<Self> {
        if center.len() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: center.len() });
        }
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            if r2 < radius * radius {
                -depth
            } else {
                0.0
            }
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Potential { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn shifted(&self, c: f64) -> Self {
        Potential { grid: self.grid.clone(), values: self.values.iter().map(|v| v + c).collect() }
    }

    /// Σ V₋^s hᴺ over the active nodes.
    pub fn negative_part_integral(&self, s: f64) -> f64 {
        let sum: f64 = self
            .grid
            .active_nodes()
            .iter()
            .map(|&i| (-self.values[i]).max(0.0))
            .filter(|v| *v > 0.0)
            .map(|v| v.powf(s))
            .sum();
        sum * self.grid.cell_volume()
    }
}

/// Position of each grid node among the active nodes.
fn active_index(grid: &Grid) -> Vec<usize> {
    let mut pos = vec![usize::MAX; grid.len()];
    for (k, &i) in grid.active_nodes().iter().enumerate() {
        pos[i] = k;
    }
    pos
}

/// 3/5/7-point Dirichlet Laplacian −Δ_h on the active nodes, in increasing node order.
pub fn dirichlet_laplacian(grid: &Grid) -> SparseSymmetric {
    let pos = active_index(grid);
    let h2 = grid.spacing() * grid.spacing();
    let dim = grid.dim();
    let rows = grid
        .active_nodes()
        .iter()
        .map(|&i| {
            let mut row = vec![(pos[i], 2.0 * dim as f64 / h2)];
            for axis in 0..dim {
                for j in [grid.backward(i, axis), grid.forward(i, axis)].into_iter().flatten() {
                    if pos[j] != usize::MAX {
                        row.push((pos[j], -1.0 / h2));
                    }
                }
            }
            row
        })
        .collect();
    SparseSymmetric::from_rows(rows)
}

#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    pub grid: Arc<Grid>,
    pub matrix: SparseSymmetric,
    pub epsilon: f64,
}

/// A = −Δ_h − (1−ε)/(4w²) + V on the active nodes.
///
/// With `weight = None` the Hardy term is omitted; with `potential = None`, V = 0.
pub fn assemble(
    grid: &Arc<Grid>,
    weight: Option<&WeightField>,
    potential: Option<&Potential>,
    epsilon: f64,
) -> Result<SchrodingerOperator> {
    if !(0.0..=1.0).contains(&epsilon) {
        return invalid(format!("epsilon must lie in [0, 1], got {epsilon}"));
    }
    if let Some(w) = weight {
        if !Arc::ptr_eq(&w.grid, grid) {
            return Err(Error::GridMismatch("weight field belongs to another grid".into()));
        }
        if w.p != 2.0 {
            return invalid(format!("the Schrödinger operator uses the p = 2 weight, got p = {}", w.p));
        }
    }
    if let Some(v) = potential {
        if !Arc::ptr_eq(v.grid(), grid) {
            return Err(Error::GridMismatch("potential belongs to another grid".into()));
        }
    }
    let lap = dirichlet_laplacian(grid);
    let mut rows: Vec<Vec<(usize, f64)>> = (0..lap.dim()).map(|r| lap.row(r).collect()).collect();
    for (k, &i) in grid.active_nodes().iter().enumerate() {
        let mut diag = 0.0;
        if let Some(w) = weight {
            let wi = w.get(i).ok_or_else(|| Error::MissingWeight { node: i, point: grid.coords(i) })?;
            diag -= (1.0 - epsilon) * 0.25 / (wi * wi);
        }
        if let Some(v) = potential {
            diag += v.get(i);
        }
        rows[k].push((k, diag));
    }
    Ok(SchrodingerOperator { grid: grid.clone(), matrix: SparseSymmetric::from_rows(rows), epsilon })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Inertia,
    Dense,
}

/// Eigenvalues below −δ, and those within ±δ of the shift, δ = 1e−12‖A‖∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NegativeCount {
    pub count: usize,
    pub indeterminate: usize,
    pub method: Method,
}

/// Number of eigenvalues of `a − shift·I` below zero.
pub fn count_below_matrix(a: &SparseSymmetric, shift: f64) -> Result<NegativeCount> {
    let delta = 1e-12 * a.norm_inf().max(shift.abs());
    let sparse = ldlt_inertia(&a.shifted(-(shift - delta)), 1e-14)
        .and_then(|lo| ldlt_inertia(&a.shifted(-(shift + delta)), 1e-14).map(|hi| (lo, hi)));
    match sparse {
        Ok((lo, hi)) => Ok(NegativeCount {
            count: lo.negative,
            indeterminate: hi.negative - lo.negative.min(hi.negative),
            method: Method::Inertia,
        }),
        Err(Error::FactorizationBreakdown { unknowns, reason }) => {
            if unknowns > DENSE_LIMIT {
                return Err(Error::FactorizationBreakdown { unknowns, reason });
            }
            let ev = symmetric_eigenvalues(a.to_dense())?;
            Ok(NegativeCount {
                count: ev.iter().filter(|&&l| l < shift - delta).count(),
                indeterminate: ev.iter().filter(|&&l| (l - shift).abs() <= delta).count(),
                method: Method::Dense,
            })
        }
        Err(e) => Err(e),
    }
}

/// Number of negative eigenvalues by LDLᵀ inertia.
pub fn count_negative(op: &SchrodingerOperator) -> Result<NegativeCount> {
    count_below_matrix(&op.matrix, 0.0)
}

/// Negative eigenvalues by a dense eigensolve, ascending.
pub fn negative_eigenvalues(op: &SchrodingerOperator) -> Result<Vec<f64>> {
    let ev = symmetric_eigenvalues(op.matrix.to_dense())?;
    Ok(ev.into_iter().take_while(|&l| l < 0.0).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub count: usize,
    pub indeterminate: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    /// The quantity being bounded (count or Riesz moment).
    pub statistic: f64,
    pub bound: f64,
    /// bound − statistic
    pub slack: f64,
    pub method: Method,
}

/// N(A) against L·Σ V₋^{N/2} hᴺ for N = 3.
pub fn clr_bound_check(
    grid: &Arc<Grid>,
    weight: &WeightField,
    potential: &Potential,
    epsilon: f64,
    l: f64,
) -> Result<SpectralReport> {
    if grid.dim() != 3 {
        return invalid(format!("the CLR check is for N = 3, got {}", grid.dim()));
    }
    let op = assemble(grid, Some(weight), Some(potential), epsilon)?;
    let c = count_negative(&op)?;
    let bound = l * potential.negative_part_integral(1.5);
    Ok(SpectralReport {
        count: c.count,
        indeterminate: c.indeterminate,
        eigenvalues: None,
        statistic: c.count as f64,
        bound,
        slack: bound - c.count as f64,
        method: c.method,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingReport {
    pub mu: f64,
    pub count: usize,
    pub indeterminate: usize,
    /// L·Σ ((2D)⁻² − μ)₋^{3/2} h³
    pub bound1: f64,
    /// L·μ^{3/2}·|{D > (4μ)^{−1/2}}|
    pub bound2: f64,
    /// count ≤ bound1 ≤ bound2
    pub ordered: bool,
    /// Nodes where the integrand of bound1 exceeds that of bound2.
    pub pointwise_violations: usize,
    pub method: Method,
}

/// Counting function of the Dirichlet Laplacian at μ against its two Hardy-based majorants.
pub fn counting_function_bound(grid: &Arc<Grid>, weight: &WeightField, mu: f64, l: f64) -> Result<CountingReport> {
    if grid.dim() != 3 {
        return invalid(format!("the counting-function bound is for N = 3, got {}", grid.dim()));
    }
    if !(mu > 0.0) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    let lap = dirichlet_laplacian(grid);
    let c = count_below_matrix(&lap, mu)?;
    let threshold = (4.0 * mu).powf(-0.5);
    let mut s1 = 0.0;
    let mut level_set = 0usize;
    let mut violations = 0;
    for &i in grid.active_nodes() {
        let d = weight.get(i).ok_or_else(|| Error::MissingWeight { node: i, point: grid.coords(i) })?;
        let neg = (mu - 0.25 / (d * d)).max(0.0);
        let term1 = neg.powf(1.5);
        let above = d > threshold;
        let term2 = if above { mu.powf(1.5) } else { 0.0 };
        if term1 > term2 * (1.0 + 1e-14) {
            violations += 1;
        }
        s1 += term1;
        level_set += above as usize;
    }
    let vol = grid.cell_volume();
    let bound1 = l * s1 * vol;
    let bound2 = l * mu.powf(1.5) * level_set as f64 * vol;
    Ok(CountingReport {
        mu,
        count: c.count,
        indeterminate: c.indeterminate,
        bound1,
        bound2,
        ordered: (c.count as f64) <= bound1 && bound1 <= bound2 * (1.0 + 1e-12),
        pointwise_violations: violations,
        method: c.method,
    })
}

/// Σ |E_j|^γ over the negative eigenvalues (dense eigensolve).
pub fn riesz_moment(op: &SchrodingerOperator, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return invalid(format!("gamma must be positive, got {gamma}"));
    }
    Ok(negative_eigenvalues(op)?.iter().map(|e| e.abs().powf(gamma)).sum())
}

/// Σ|E_j|^γ against L·Σ V₋^{γ+N/2} hᴺ for N = 1, 2.
pub fn hlt_bound_check(
    grid: &Arc<Grid>,
    weight: &WeightField,
    potential: &Potential,
    epsilon: f64,
    gamma: f64,
    l: f64,
) -> Result<SpectralReport> {
    let dim = grid.dim();
    match dim {
        1 if gamma <= 0.5 => return invalid(format!("N = 1 needs gamma > 1/2, got {gamma}")),
        2 if gamma <= 0.0 => return invalid(format!("N = 2 needs gamma > 0, got {gamma}")),
        1 | 2 => {}
        _ => return invalid(format!("the HLT check is for N = 1, 2, got {dim}")),
    }
    let op = assemble(grid, Some(weight), Some(potential), epsilon)?;
    let ev = negative_eigenvalues(&op)?;
    let moment: f64 = ev.iter().map(|e| e.abs().powf(gamma)).sum();
    let bound = l * potential.negative_part_integral(gamma + dim as f64 / 2.0);
    Ok(SpectralReport {
        count: ev.len(),
        indeterminate: 0,
        eigenvalues: Some(ev),
        statistic: moment,
        bound,
        slack: bound - moment,
        method: Method::Dense,
    })
}

fn dense_laplacian_plus(grid: &Grid, tau: f64) -> DMatrix<f64> {
    let mut m = dirichlet_laplacian(grid).to_dense();
    for k in 0..m.nrows() {
        m[(k, k)] += tau;
    }
    m
}

fn active_potential(w: &Potential) -> Result<Vec<f64>> {
    let vals: Vec<f64> = w.grid().active_nodes().iter().map(|&i| w.get(i)).collect();
    if vals.iter().any(|v| *v < 0.0) {
        return invalid("W must be nonnegative");
    }
    Ok(vals)
}

/// (A, B): A counts eigenvalues of W^{1/2}(−Δ+τ)^{−1}W^{1/2} above 1/μ,
/// B counts negative eigenvalues of −Δ + τ − μW. Both by dense eigensolves.
pub fn birman_schwinger_check(w: &Potential, mu: f64, tau: f64) -> Result<(usize, usize)> {
    Ok(birman_schwinger_counts(w, &[mu], tau)?[0])
}

/// `birman_schwinger_check` for several couplings; the kernel is diagonalized once.
pub fn birman_schwinger_counts(w: &Potential, mus: &[f64], tau: f64) -> Result<Vec<(usize, usize)>> {
    if mus.iter().any(|mu| !(*mu > 0.0)) || !(tau >= 0.0) {
        return invalid(format!("need mu > 0 and tau >= 0, got mu = {mus:?}, tau = {tau}"));
    }
    let grid = w.grid();
    let wv = active_potential(w)?;
    let op = dense_laplacian_plus(grid, tau);
    let n = op.nrows();
    let sqrt_w = DVector::from_iterator(n, wv.iter().map(|v| v.sqrt()));
    let chol = op
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigen("−Δ + τ is not positive definite".into()))?;
    let solved = chol.solve(&DMatrix::from_diagonal(&sqrt_w));
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            k[(i, j)] = sqrt_w[i] * solved[(i, j)];
        }
    }
    let k = (&k + k.transpose()) * 0.5;
    let kernel = symmetric_eigenvalues(k)?;
    mus.iter()
        .map(|&mu| {
            let count_a = kernel.iter().filter(|&&l| l > 1.0 / mu).count();
            let mut b = op.clone();
            for i in 0..n {
                b[(i, i)] -= mu * wv[i];
            }
            let count_b = symmetric_eigenvalues(b)?.iter().filter(|&&l| l < 0.0).count();
            Ok((count_a, count_b))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedEigenReport {
    /// μ_j of W^{−1/2}(−Δ+τ)W^{−1/2}, ascending.
    pub eigenvalues: Vec<f64>,
    /// Least-squares slope of log μ_j against log j over j ≤ n/4.
    pub slope: f64,
    /// 2/N
    pub expected_slope: f64,
    /// min_j μ_j / j^{2/N}
    pub growth_constant: f64,
}

/// Eigenvalues of W^{−1/2}(−Δ+τ)W^{−1/2} and their growth rate in j.
pub fn weighted_eigenvalue_bound(w: &Potential, tau: f64) -> Result<WeightedEigenReport> {
    if !(tau >= 0.0) {
        return invalid(format!("tau must be nonnegative, got {tau}"));
    }
    let grid = w.grid();
    let wv = active_potential(w)?;
    if let Some(k) = wv.iter().position(|v| *v == 0.0) {
        return invalid(format!("W vanishes at active node {}", grid.active_nodes()[k]));
    }
    let mut m = dense_laplacian_plus(grid, tau);
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= (wv[i] * wv[j]).sqrt();
        }
    }
    let ev = symmetric_eigenvalues(m)?;
    let dim = grid.dim() as f64;
    let upto = (n / 4).max(2).min(n);
    let pts: Vec<(f64, f64)> = (0..upto)
        .filter(|&j| ev[j] > 0.0)
        .map(|j| (((j + 1) as f64).ln(), ev[j].ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let growth_constant =
        ev.iter().enumerate().map(|(j, &m)| m / ((j + 1) as f64).powf(2.0 / dim)).fold(f64::INFINITY, f64::min);
    Ok(WeightedEigenReport { eigenvalues: ev, slope: sxy / sxx, expected_slope: 2.0 / dim, growth_constant })
}
