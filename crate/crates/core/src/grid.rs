//! Uniform Cartesian grids over a domain's bounding box.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::geometry::Domain;

/// Uniform grid covering the bounding box of a domain plus one ghost layer.
///
/// Nodes are numbered row-major (last axis fastest). A node is *inside* when
/// it lies in Ω and *active* when it additionally sits at least `margin`
/// (default h/2) from ∂Ω; grid functions are supported on active nodes.
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    h: f64,
    origin: Vec<f64>,
    bbox: (Vec<f64>, Vec<f64>),
    shape: Vec<usize>,
    strides: Vec<usize>,
    inside: Vec<bool>,
    active: Vec<bool>,
    active_nodes: Vec<usize>,
    boundary_distance: Vec<f64>,
}

impl Grid {
    pub fn new(domain: &Domain, h: f64) -> Result<Arc<Self>> {
        Self::with_margin(domain, h, 0.5 * h)
    }

    pub fn with_margin(domain: &Domain, h: f64, margin: f64) -> Result<Arc<Self>> {
        if !(h > 0.0 && h.is_finite()) {
            return invalid(format!("grid spacing must be positive, got {h}"));
        }
        let dim = domain.dim();
        let (lo, hi) = domain.bounding_box();
        let mut shape = Vec::with_capacity(dim);
        let mut origin = Vec::with_capacity(dim);
        let mut total = 1usize;
        for k in 0..dim {
            let m = ((hi[k] - lo[k]) / h - 1e-9).ceil().max(1.0) as usize;
            shape.push(m + 3);
            origin.push(lo[k] - h);
            total = total.saturating_mul(m + 3);
        }
        if total > 50_000_000 {
            return invalid(format!("grid with {total} nodes is too large"));
        }
        let strides = (0..dim).map(|k| shape[k + 1..].iter().product()).collect();
        let mut grid = Grid {
            dim,
            h,
            origin,
            bbox: (lo.to_vec(), hi.to_vec()),
            shape,
            strides,
            inside: vec![false; total],
            active: vec![false; total],
            active_nodes: Vec::new(),
            boundary_distance: vec![0.0; total],
        };
        let floor = margin.max(domain.proximity_floor());
        let mut x = vec![0.0; dim];
        for idx in 0..total {
            grid.coords_into(idx, &mut x);
            if domain.contains_unchecked(&x) {
                grid.inside[idx] = true;
                let d = domain.boundary_distance_unchecked(&x);
                grid.boundary_distance[idx] = d;
                if d >= floor {
                    grid.active[idx] = true;
                    grid.active_nodes.push(idx);
                }
            }
        }
        Ok(Arc::new(grid))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Bounding box of the domain the grid was built on.
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox.0, &self.bbox.1)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    /// Active node indices in increasing order.
    pub fn active_nodes(&self) -> &[usize] {
        &self.active_nodes
    }

    pub fn boundary_distance(&self, idx: usize) -> f64 {
        self.boundary_distance[idx]
    }

    /// |Ω| estimated by counting inside nodes.
    pub fn domain_measure(&self) -> f64 {
        self.inside.iter().filter(|&&b| b).count() as f64 * self.cell_volume()
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            out[k] = idx % self.shape[k];
            idx /= self.shape[k];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn coords_into(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for k in (0..self.dim).rev() {
            let i = rem % self.shape[k];
            rem /= self.shape[k];
            out[k] = self.origin[k] + i as f64 * self.h;
        }
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.coords_into(idx, &mut x);
        x
    }

    /// Row-major stride of an axis.
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Index of the node one step forward along `axis`, if it exists.
    pub fn forward(&self, idx: usize, axis: usize) -> Option<usize> {
        let stride = self.stride(axis);
        let i = (idx / stride) % self.shape[axis];
        (i + 1 < self.shape[axis]).then_some(idx + stride)
    }

    pub fn backward(&self, idx: usize, axis: usize) -> Option<usize> {
        let stride = self.stride(axis);
        let i = (idx / stride) % self.shape[axis];
        (i > 0).then(|| idx - stride)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_grid_layout() {
        let d = Domain::interval_union(vec![(0.0, 1.0)]).unwrap();
        let g = Grid::new(&d, 0.125).unwrap();
        // ghost, 0, 1/8, ..., 1, ghost
        assert_eq!(g.shape(), &[11]);
        assert_eq!(g.active_nodes().len(), 7);
        assert_eq!(g.coords(g.active_nodes()[0]), vec![0.125]);
        assert!((g.domain_measure() - 7.0 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn neighbors_and_indices_roundtrip() {
        let d = Domain::axis_box(vec![0.0, 0.0, 0.0], vec![1.0, 0.5, 0.25]).unwrap();
        let g = Grid::new(&d, 0.125).unwrap();
        for idx in [0, 17, g.len() - 1] {
            assert_eq!(g.flat_index(&g.multi_index(idx)), idx);
        }
        let idx = g.active_nodes()[3];
        for axis in 0..3 {
            let f = g.forward(idx, axis).unwrap();
            assert_eq!(g.backward(f, axis), Some(idx));
            let (a, b) = (g.coords(idx), g.coords(f));
            assert!((b[axis] - a[axis] - 0.125).abs() < 1e-15);
        }
        assert_eq!(g.backward(0, 0), None);
    }
}
