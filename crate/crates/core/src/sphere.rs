//! Normalized spherical quadrature and the Davies weight D_{Ω,p}.
//!
//! D_{Ω,p}(x) = (c_{N,p} · avg_e d_e(x)^{-p})^{-1/p}, where the average is the
//! normalized surface mean over 𝕊^{N−1} and
//! c_{N,p} = √π Γ((N+p)/2) / (Γ((p+1)/2) Γ(N/2)). For p = 2, c_{N,2} = N.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::Domain;
use crate::grid::Grid;
use crate::special::ln_gamma;

/// Default number of equispaced angles for N = 2.
pub const DEFAULT_CIRCLE_NODES: usize = 2048;
/// Default (Gauss–Legendre in cos θ, azimuthal) resolution for N = 3.
pub const DEFAULT_SPHERE_NODES: (usize, usize) = (1024, 1024);

/// Nodes and weights for the normalized average |𝕊^{N−1}|⁻¹∫·de.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    resolution: Vec<usize>,
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = Pₙ(z), p0 = Pₙ₋₁(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl SphereQuadrature {
    /// `resolution` is ignored for N = 1, `[m]` for N = 2 and `[gl, azimuthal]` for N = 3.
    pub fn new(dim: usize, resolution: &[usize]) -> Result<Self> {
        match dim {
            1 => Ok(SphereQuadrature {
                dim,
                nodes: vec![1.0, -1.0],
                weights: vec![0.5, 0.5],
                resolution: vec![2],
            }),
            2 => {
                let m = *resolution.first().ok_or_else(|| Error::InvalidParameter("missing resolution".into()))?;
                if m < 3 {
                    return invalid("circle quadrature needs at least 3 nodes");
                }
                let mut nodes = Vec::with_capacity(2 * m);
                for k in 0..m {
                    let a = 2.0 * PI * k as f64 / m as f64;
                    nodes.push(a.cos());
                    nodes.push(a.sin());
                }
                Ok(SphereQuadrature { dim, nodes, weights: vec![1.0 / m as f64; m], resolution: vec![m] })
            }
            3 => {
                if resolution.len() < 2 || resolution[0] < 1 || resolution[1] < 3 {
                    return invalid("sphere quadrature needs [gauss-legendre >= 1, azimuthal >= 3] nodes");
                }
                let (ng, nphi) = (resolution[0], resolution[1]);
                let (ct, wt) = gauss_legendre(ng);
                let wsum: f64 = wt.iter().sum();
                let mut nodes = Vec::with_capacity(3 * ng * nphi);
                let mut weights = Vec::with_capacity(ng * nphi);
                for (c, w) in ct.iter().zip(&wt) {
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    for k in 0..nphi {
                        let phi = 2.0 * PI * k as f64 / nphi as f64;
                        nodes.extend_from_slice(&[s * phi.cos(), s * phi.sin(), *c]);
                        weights.push(w / wsum / nphi as f64);
                    }
                }
                Ok(SphereQuadrature { dim, nodes, weights, resolution: vec![ng, nphi] })
            }
            _ => invalid(format!("sphere quadrature supports N = 1, 2, 3; got {dim}")),
        }
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, &[]),
            2 => Self::new(2, &[DEFAULT_CIRCLE_NODES]),
            3 => Self::new(3, &[DEFAULT_SPHERE_NODES.0, DEFAULT_SPHERE_NODES.1]),
            _ => invalid(format!("sphere quadrature supports N = 1, 2, 3; got {dim}")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Normalized average of `f` over the sphere.
    pub fn average<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        (0..self.len()).map(|k| self.weights[k] * f(self.node(k))).sum()
    }
}

/// c_{N,p} = √π Γ((N+p)/2) / (Γ((p+1)/2) Γ(N/2)), evaluated in log space.
pub fn gamma_normalization(dim: usize, p: f64) -> Result<f64> {
    if dim < 1 || !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("gamma normalization needs N >= 1 and p >= 1 (N = {dim}, p = {p})"));
    }
    let n = dim as f64;
    let ln = 0.5 * PI.ln() + ln_gamma(0.5 * (n + p)) - ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * n);
    Ok(ln.exp())
}

fn weight_from_average(c: f64, avg: f64, p: f64) -> f64 {
    (c * avg).powf(-1.0 / p)
}

/// Sum of wₖ d_{eₖ}(x)^{-p}; infinite distances contribute zero.
fn inverse_power_average(domain: &Domain, x: &[f64], p: f64, quad: &SphereQuadrature) -> f64 {
    let mut acc = 0.0;
    for k in 0..quad.len() {
        let d = domain.directional_distance_unchecked(x, quad.node(k));
        if d.is_finite() {
            acc += quad.weights[k] * d.powf(-p);
        }
    }
    acc
}

/// D_{Ω,p}(x).
pub fn davies_weight(domain: &Domain, x: &[f64], p: f64, quad: &SphereQuadrature) -> Result<f64> {
    let c = gamma_normalization(domain.dim(), p)?;
    davies_weight_with(domain, x, p, c, quad)
}

fn davies_weight_with(domain: &Domain, x: &[f64], p: f64, c: f64, quad: &SphereQuadrature) -> Result<f64> {
    if quad.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: quad.dim() });
    }
    if !domain.contains(x)? {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    let dist = domain.boundary_distance_unchecked(x);
    if dist < domain.proximity_floor() {
        return Err(Error::TooCloseToBoundary { point: x.to_vec(), distance: dist });
    }
    let avg = inverse_power_average(domain, x, p, quad);
    if avg == 0.0 {
        return Err(Error::InfiniteWeight { point: x.to_vec() });
    }
    Ok(weight_from_average(c, avg, p))
}

/// Which weight a Hardy term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// D_{Ω,p}
    Davies,
    /// dist(x, Ω^c)
    Euclidean,
}

/// A weight sampled at the active nodes of a grid.
#[derive(Debug, Clone)]
pub struct WeightField {
    pub grid: Arc<Grid>,
    pub p: f64,
    pub kind: WeightKind,
    pub values: Vec<Option<f64>>,
    /// Smallest stored value.
    pub floor: f64,
    /// Quadrature resolution used (empty for euclidean weights).
    pub resolution: Vec<usize>,
}

impl WeightField {
    pub fn get(&self, node: usize) -> Option<f64> {
        self.values[node]
    }

    /// dist(x, Ω^c) at the active nodes.
    pub fn euclidean(grid: Arc<Grid>, p: f64) -> Self {
        let mut values = vec![None; grid.len()];
        let mut floor = f64::INFINITY;
        for &i in grid.active_nodes() {
            let d = grid.boundary_distance(i);
            floor = floor.min(d);
            values[i] = Some(d);
        }
        WeightField { grid, p, kind: WeightKind::Euclidean, values, floor, resolution: Vec::new() }
    }
}

/// D_{Ω,p} at every active node of `grid`, evaluated in parallel.
pub fn weight_field(domain: &Domain, grid: Arc<Grid>, p: f64, quad: &SphereQuadrature) -> Result<WeightField> {
    if grid.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: grid.dim() });
    }
    let c = gamma_normalization(domain.dim(), p)?;
    let computed: Vec<(usize, f64)> = grid
        .active_nodes()
        .par_iter()
        .map(|&i| {
            let x = grid.coords(i);
            davies_weight_with(domain, &x, p, c, quad).map(|v| (i, v))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![None; grid.len()];
    let mut floor = f64::INFINITY;
    for (i, v) in computed {
        floor = floor.min(v);
        values[i] = Some(v);
    }
    Ok(WeightField {
        grid,
        p,
        kind: WeightKind::Davies,
        values,
        floor,
        resolution: quad.resolution().to_vec(),
    })
}

/// (Σₖ wₖ |a·eₖ|^p, Γ((p+1)/2)Γ(N/2)/(√π Γ((N+p)/2)) |a|^p).
pub fn sphere_moment_check(a: &[f64], p: f64, quad: &SphereQuadrature) -> Result<(f64, f64)> {
    if a.len() != quad.dim() {
        return Err(Error::DimensionMismatch { expected: quad.dim(), got: a.len() });
    }
    let norm = a.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return invalid("moment check needs a nonzero vector");
    }
    let c = gamma_normalization(quad.dim(), p)?;
    let numeric = quad.average(|e| {
        let s: f64 = a.iter().zip(e).map(|(x, y)| x * y).sum();
        s.abs().powf(p)
    });
    Ok((numeric, norm.powf(p) / c))
}

/// D_Ω(x) ≤ dist(x, Ω^c)·(1 + rel_tol) at one sample of a convex domain.
pub fn min_directional_distance_property(
    domain: &Domain,
    x: &[f64],
    p: f64,
    quad: &SphereQuadrature,
    rel_tol: f64,
) -> Result<bool> {
    if !domain.is_convex() {
        return Err(Error::NotConvex);
    }
    let dist = domain.boundary_distance(x)?;
    let d = davies_weight(domain, x, p, quad)?;
    Ok(d <= dist * (1.0 + rel_tol))
}
