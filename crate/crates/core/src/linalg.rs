//! Sparse symmetric matrices, envelope LDLᵀ inertia and dense eigenvalues.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric matrix in row-compressed form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetric {
    /// Builds from per-row `(col, value)` lists; duplicates are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetric { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// xᵀAx
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Max absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Copy with `shift` added to the diagonal.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = (0..self.n).map(|i| self.row(i).collect()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push((i, shift));
        }
        Self::from_rows(rows)
    }
}

/// Numbers of negative, zero and positive pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Inertia of a symmetric matrix from an unpivoted envelope LDLᵀ
/// factorization (Sylvester's law of inertia).
///
/// The envelope of row i starts at its first nonzero column; fill-in stays
/// inside it. Pivots with |dᵢ| ≤ `pivot_tol`·‖A‖∞, or element growth beyond
/// 1e8·‖A‖∞, are reported as breakdown.
pub fn ldlt_inertia(a: &SparseSymmetric, pivot_tol: f64) -> Result<Inertia> {
    let n = a.dim();
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);
    let first: Vec<usize> = (0..n).map(|i| a.row(i).map(|(j, _)| j).min().unwrap_or(i).min(i)).collect();
    // rows[i][j - first[i]] holds L_ij for j < i, and d_i at j = i.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut d = vec![0.0; n];
    let mut inertia = Inertia { negative: 0, zero: 0, positive: 0 };
    let mut w = Vec::new();
    for i in 0..n {
        let fi = first[i];
        let width = i - fi + 1;
        let mut row = vec![0.0; width];
        for (j, v) in a.row(i) {
            if j <= i {
                row[j - fi] = v;
            }
        }
        // w_j = L_ij d_j = a_ij − Σ_k L_ik d_k L_jk
        w.clear();
        w.resize(width - 1, 0.0);
        for j in fi..i {
            let rj = &rows[j];
            let fj = first[j];
            let start = fi.max(fj);
            let mut s = row[j - fi];
            for k in start..j {
                s -= w[k - fi] * rj[k - fj];
            }
            w[j - fi] = s;
            row[j - fi] = s / d[j];
        }
        let mut di = row[width - 1];
        for k in fi..i {
            di -= row[k - fi] * w[k - fi];
        }
        if !di.is_finite() || di.abs() > 1e8 * norm {
            return Err(Error::FactorizationBreakdown { unknowns: n, reason: format!("pivot growth at row {i}") });
        }
        if di.abs() <= pivot_tol * norm {
            return Err(Error::FactorizationBreakdown {
                unknowns: n,
                reason: format!("near-zero pivot {di:e} at row {i}"),
            });
        }
        if di < 0.0 {
            inertia.negative += 1;
        } else {
            inertia.positive += 1;
        }
        d[i] = di;
        row[width - 1] = di;
        rows.push(row);
    }
    Ok(inertia)
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Eigen("matrix is not square".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    // Eigenvalues only; the implicit QR iteration is unbounded but converges for finite input.
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, diag: impl Fn(usize) -> f64) -> SparseSymmetric {
        SparseSymmetric::from_rows(
            (0..n)
                .map(|i| {
                    let mut r = vec![(i, diag(i))];
                    if i > 0 {
                        r.push((i - 1, -1.0));
                    }
                    if i + 1 < n {
                        r.push((i + 1, -1.0));
                    }
                    r
                })
                .collect(),
        )
    }

    #[test]
    fn inertia_of_shifted_laplacian() {
        let n = 50;
        let a = tridiag(n, |_| 2.0);
        // eigenvalues 2 − 2cos(kπ/(n+1))
        for shift in [0.05, 0.5, 1.7, 3.3] {
            let expected = (1..=n)
                .filter(|&k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos() < shift)
                .count();
            let inertia = ldlt_inertia(&a.shifted(-shift), 1e-14).unwrap();
            assert_eq!(inertia.negative, expected, "shift {shift}");
            assert_eq!(inertia.negative + inertia.positive, n);
        }
    }

    #[test]
    fn zero_pivot_is_breakdown() {
        let a = SparseSymmetric::from_rows(vec![vec![(0, 0.0), (1, 1.0)], vec![(0, 1.0), (1, 0.0)]]);
        assert!(matches!(ldlt_inertia(&a, 1e-14), Err(Error::FactorizationBreakdown { .. })));
    }

    #[test]
    fn inertia_agrees_with_dense_on_random_banded() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.random_range(5..80);
            let bw = rng.random_range(1..6);
            let mut rows = vec![Vec::new(); n];
            for i in 0..n {
                rows[i].push((i, rng.random_range(-3.0..3.0)));
                for j in (i + 1)..(i + bw + 1).min(n) {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    rows[i].push((j, v));
                    rows[j].push((i, v));
                }
            }
            let a = SparseSymmetric::from_rows(rows);
            assert!(a.is_symmetric(0.0));
            let ev = symmetric_eigenvalues(a.to_dense()).unwrap();
            if let Ok(inertia) = ldlt_inertia(&a, 1e-12) {
                assert_eq!(inertia.negative, ev.iter().filter(|&&v| v < 0.0).count());
            }
        }
    }
}
