//! Domains Ω ⊊ ℝᴺ (N = 1, 2, 3) with membership, directional-distance and
//! boundary-distance queries.
//!
//! All shapes are open sets. A point on the boundary is not a member, and
//! every query that requires `x ∈ Ω` rejects boundary points.

mod file;
pub mod random;

pub use file::{load_domain_file, parse_domain_spec, DomainSpec};

use crate::error::{Error, Result};

/// Unit vector on 𝕊^{N−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if components.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "direction must have unit length, |e| = {norm}"
            )));
        }
        Ok(Direction(components))
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Ok(Direction(v.iter().map(|c| c / norm).collect()))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Half-space `normal · x < offset`, stored with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Disjoint open intervals sorted by left endpoint.
    IntervalUnion(Vec<(f64, f64)>),
    /// Simple polygon, counter-clockwise vertex list.
    Polygon(Vec<[f64; 2]>),
    Ball { center: Vec<f64>, radius: f64 },
    AxisBox { min: Vec<f64>, max: Vec<f64> },
    ConvexPolytope(Vec<HalfSpace>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    shape: Shape,
    convex: bool,
    bbox_min: Vec<f64>,
    bbox_max: Vec<f64>,
}

fn bad(path: &str, reason: impl Into<String>) -> Error {
    Error::InvalidDomain { path: path.to_string(), reason: reason.into() }
}

fn check_dim(dim: usize, path: &str) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(bad(path, format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    Ok(())
}

fn check_finite(v: &[f64], path: &str) -> Result<()> {
    if let Some(i) = v.iter().position(|c| !c.is_finite()) {
        return Err(bad(&format!("{path}[{i}]"), "coordinate is not finite"));
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn point_segment_distance(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = sub2(b, a);
    let r = sub2(x, a);
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 { (dot(&r, &d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let p = [a[0] + s * d[0] - x[0], a[1] + s * d[1] - x[1]];
    p[0].hypot(p[1])
}

/// Closed-segment intersection test.
fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let scale = [p1, p2, q1, q2]
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0_f64, |m, c| m.max(c.abs()));
    let eps = 1e-12 * scale * scale;
    let o = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        let v = cross2(sub2(b, a), sub2(c, a));
        if v > eps {
            1
        } else if v < -eps {
            -1
        } else {
            0
        }
    };
    let on_seg = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        c[0] >= a[0].min(b[0]) - eps.sqrt()
            && c[0] <= a[0].max(b[0]) + eps.sqrt()
            && c[1] >= a[1].min(b[1]) - eps.sqrt()
            && c[1] <= a[1].max(b[1]) + eps.sqrt()
    };
    let (o1, o2, o3, o4) = (o(p1, p2, q1), o(p1, p2, q2), o(q1, q2, p1), o(q1, q2, p2));
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    (o1 == 0 && on_seg(p1, p2, q1))
        || (o2 == 0 && on_seg(p1, p2, q2))
        || (o3 == 0 && on_seg(q1, q2, p1))
        || (o4 == 0 && on_seg(q1, q2, p2))
}

fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Unit vector orthogonal to the given N−1 vectors in ℝᴺ, if they are independent.
fn null_direction(dim: usize, rows: &[&[f64]]) -> Option<Vec<f64>> {
    let v = match dim {
        1 => vec![1.0],
        2 => vec![-rows[0][1], rows[0][0]],
        3 => {
            let (a, b) = (rows[0], rows[1]);
            vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        }
        _ => return None,
    };
    let n = dot(&v, &v).sqrt();
    (n > 1e-10).then(|| v.iter().map(|c| c / n).collect())
}

impl Domain {
    pub fn interval_union(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(bad("$.intervals", "at least one interval is required"));
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(bad(&format!("$.intervals[{i}]"), "endpoints must be finite"));
            }
            if b <= a {
                return Err(bad(&format!("$.intervals[{i}]"), "interval must have positive length"));
            }
        }
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&i, &j| intervals[i].0.total_cmp(&intervals[j].0));
        for w in order.windows(2) {
            if intervals[w[1]].0 < intervals[w[0]].1 {
                return Err(bad(
                    &format!("$.intervals[{}]", w[1]),
                    format!("overlaps interval {}", w[0]),
                ));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let lo = intervals[0].0;
        let hi = intervals[intervals.len() - 1].1;
        let convex = intervals.len() == 1;
        Ok(Domain {
            dim: 1,
            shape: Shape::IntervalUnion(intervals),
            convex,
            bbox_min: vec![lo],
            bbox_max: vec![hi],
        })
    }

    /// Simple polygon; clockwise input is reoriented to counter-clockwise.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(bad("$.vertices", "a polygon needs at least 3 vertices"));
        }
        for (i, v) in vertices.iter().enumerate() {
            check_finite(v, &format!("$.vertices[{i}]"))?;
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i] == vertices[j] {
                return Err(bad(&format!("$.vertices[{j}]"), format!("repeats vertex {i}")));
            }
        }
        // Non-adjacent edges must not meet; adjacent edges must only share their vertex.
        for i in 0..n {
            let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Shared vertex; fold-back means the edges are collinear and overlap.
                    let (shared, other_a, other_b) =
                        if j == i + 1 { (a2, a1, b2) } else { (a1, a2, b1) };
                    let u = sub2(other_a, shared);
                    let w = sub2(other_b, shared);
                    if cross2(u, w).abs() <= 1e-14 * (dot(&u, &u) * dot(&w, &w)).sqrt()
                        && dot(&u, &w) > 0.0
                    {
                        return Err(bad(
                            "$.vertices",
                            format!("self-intersection: edges {i} and {j} overlap"),
                        ));
                    }
                } else if segments_intersect(a1, a2, b1, b2) {
                    return Err(bad(
                        "$.vertices",
                        format!("self-intersection: edges {i} and {j} intersect"),
                    ));
                }
            }
        }
        let area2: f64 = (0..n).map(|i| cross2(vertices[i], vertices[(i + 1) % n])).sum();
        if area2 == 0.0 {
            return Err(bad("$.vertices", "polygon has zero area"));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        let mut sign = 0.0_f64;
        let mut convex = true;
        for i in 0..n {
            let e1 = sub2(vertices[(i + 1) % n], vertices[i]);
            let e2 = sub2(vertices[(i + 2) % n], vertices[(i + 1) % n]);
            let c = cross2(e1, e2);
            if c != 0.0 {
                if sign == 0.0 {
                    sign = c.signum();
                } else if c.signum() != sign {
                    convex = false;
                }
            }
        }
        let mut bbox_min = vec![f64::INFINITY; 2];
        let mut bbox_max = vec![f64::NEG_INFINITY; 2];
        for v in &vertices {
            for k in 0..2 {
                bbox_min[k] = bbox_min[k].min(v[k]);
                bbox_max[k] = bbox_max[k].max(v[k]);
            }
        }
        Ok(Domain { dim: 2, shape: Shape::Polygon(vertices), convex, bbox_min, bbox_max })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len(), "$.center")?;
        check_finite(&center, "$.center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(bad("$.radius", "radius must be positive and finite"));
        }
        let bbox_min = center.iter().map(|c| c - radius).collect();
        let bbox_max = center.iter().map(|c| c + radius).collect();
        Ok(Domain {
            dim: center.len(),
            shape: Shape::Ball { center, radius },
            convex: true,
            bbox_min,
            bbox_max,
        })
    }

    pub fn axis_box(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        check_dim(min.len(), "$.min")?;
        if max.len() != min.len() {
            return Err(bad("$.max", format!("expected {} coordinates", min.len())));
        }
        check_finite(&min, "$.min")?;
        check_finite(&max, "$.max")?;
        for k in 0..min.len() {
            if min[k] >= max[k] {
                return Err(bad(&format!("$.max[{k}]"), "max must exceed min"));
            }
        }
        Ok(Domain {
            dim: min.len(),
            shape: Shape::AxisBox { min: min.clone(), max: max.clone() },
            convex: true,
            bbox_min: min,
            bbox_max: max,
        })
    }

    /// Bounded polytope {x : aᵢ·x < bᵢ}.
    pub fn convex_polytope(halfspaces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(bad("$.halfspaces", "at least one half-space is required"));
        }
        let dim = halfspaces[0].0.len();
        check_dim(dim, "$.halfspaces[0].a")?;
        let mut hs = Vec::with_capacity(halfspaces.len());
        for (i, (a, b)) in halfspaces.into_iter().enumerate() {
            if a.len() != dim {
                return Err(bad(&format!("$.halfspaces[{i}].a"), format!("expected {dim} coordinates")));
            }
            check_finite(&a, &format!("$.halfspaces[{i}].a"))?;
            if !b.is_finite() {
                return Err(bad(&format!("$.halfspaces[{i}].b"), "offset must be finite"));
            }
            let n = dot(&a, &a).sqrt();
            if n == 0.0 {
                return Err(bad(&format!("$.halfspaces[{i}].a"), "normal must be nonzero"));
            }
            hs.push(HalfSpace { normal: a.iter().map(|c| c / n).collect(), offset: b / n });
        }
        // Bounded iff the recession cone {d : aᵢ·d ≤ 0 ∀i} is trivial. A
        // nontrivial cone either contains a line (normals do not span ℝᴺ) or
        // has an extreme ray cut out by N−1 active constraints.
        let candidate_rays: Vec<Vec<f64>> = if dim == 1 {
            vec![vec![1.0]]
        } else {
            combinations(hs.len(), dim - 1)
                .into_iter()
                .filter_map(|idx| {
                    let rows: Vec<&[f64]> = idx.iter().map(|&i| hs[i].normal.as_slice()).collect();
                    null_direction(dim, &rows)
                })
                .collect()
        };
        let mut spans = dim == 1;
        if dim > 1 {
            // Rank check: some N-subset of normals is independent.
            spans = combinations(hs.len(), dim).into_iter().any(|idx| {
                let a: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].normal.clone()).collect();
                solve_small(&a, &vec![0.0; dim]).is_some()
            });
        }
        let unbounded_ray = candidate_rays.iter().any(|d| {
            [1.0, -1.0].iter().any(|s| hs.iter().all(|h| s * dot(&h.normal, d) <= 1e-12))
        });
        if !spans || unbounded_ray {
            return Err(bad("$.halfspaces", "polytope is unbounded"));
        }
        // Vertex enumeration for the bounding box and an interior witness.
        let mut verts: Vec<Vec<f64>> = Vec::new();
        for idx in combinations(hs.len(), dim) {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].normal.clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| hs[i].offset).collect();
            if let Some(v) = solve_small(&a, &b) {
                if hs.iter().all(|h| dot(&h.normal, &v) <= h.offset + 1e-9 * (1.0 + h.offset.abs())) {
                    verts.push(v);
                }
            }
        }
        if verts.is_empty() {
            return Err(bad("$.halfspaces", "polytope is empty"));
        }
        let mut centroid = vec![0.0; dim];
        let mut bbox_min = vec![f64::INFINITY; dim];
        let mut bbox_max = vec![f64::NEG_INFINITY; dim];
        for v in &verts {
            for k in 0..dim {
                centroid[k] += v[k] / verts.len() as f64;
                bbox_min[k] = bbox_min[k].min(v[k]);
                bbox_max[k] = bbox_max[k].max(v[k]);
            }
        }
        let extent = bbox_min.iter().zip(&bbox_max).map(|(a, b)| b - a).fold(0.0, f64::max);
        let margin = hs.iter().map(|h| h.offset - dot(&h.normal, &centroid)).fold(f64::INFINITY, f64::min);
        if !(margin > 1e-9 * extent.max(1e-300)) {
            return Err(bad("$.halfspaces", "polytope has empty interior"));
        }
        Ok(Domain { dim, shape: Shape::ConvexPolytope(hs), convex: true, bbox_min, bbox_max })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox_min, &self.bbox_max)
    }

    pub fn diameter(&self) -> f64 {
        self.bbox_min
            .iter()
            .zip(&self.bbox_max)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    /// Distance below which weight evaluation refuses a point.
    pub fn proximity_floor(&self) -> f64 {
        1e-12 * self.diameter()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::IntervalUnion(iv) => iv.iter().any(|&(a, b)| a < x[0] && x[0] < b),
            Shape::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                r2 < radius * radius
            }
            Shape::AxisBox { min, max } => (0..self.dim).all(|k| min[k] < x[k] && x[k] < max[k]),
            Shape::ConvexPolytope(hs) => hs.iter().all(|h| dot(&h.normal, x) < h.offset),
            Shape::Polygon(v) => polygon_contains(v, [x[0], x[1]]),
        }
    }

    fn require_inside(&self, x: &[f64]) -> Result<()> {
        self.check_point(x)?;
        if !self.contains_unchecked(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        Ok(())
    }

    /// d_e(x) = inf{|t| : x + te ∉ Ω}; `+inf` when the whole line stays in Ω.
    pub fn directional_distance(&self, x: &[f64], e: &Direction) -> Result<f64> {
        self.require_inside(x)?;
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: e.dim() });
        }
        Ok(self.directional_distance_unchecked(x, e.components()))
    }

    /// As [`Domain::directional_distance`] without the membership check.
    pub fn directional_distance_unchecked(&self, x: &[f64], e: &[f64]) -> f64 {
        match &self.shape {
            Shape::IntervalUnion(_) => {
                if e[0] == 0.0 {
                    f64::INFINITY
                } else {
                    self.boundary_distance_unchecked(x) / e[0].abs()
                }
            }
            Shape::Ball { center, radius } => {
                // |x - c + t e|² = R²  ⇒  t² + 2bt + c0 = 0 with c0 < 0 inside.
                let mut b = 0.0;
                let mut c0 = -radius * radius;
                for k in 0..self.dim {
                    let r = x[k] - center[k];
                    b += r * e[k];
                    c0 += r * r;
                }
                let disc = (b * b - c0).max(0.0).sqrt();
                // Roots -b ± disc; the smaller magnitude is disc - |b|.
                disc - b.abs()
            }
            Shape::AxisBox { min, max } => {
                let mut d = f64::INFINITY;
                for k in 0..self.dim {
                    if e[k] != 0.0 {
                        let a = e[k].abs();
                        d = d.min((x[k] - min[k]) / a).min((max[k] - x[k]) / a);
                    }
                }
                d
            }
            Shape::ConvexPolytope(hs) => {
                let mut d = f64::INFINITY;
                for h in hs {
                    let s = dot(&h.normal, e).abs();
                    if s > 0.0 {
                        d = d.min((h.offset - dot(&h.normal, x)) / s);
                    }
                }
                d
            }
            Shape::Polygon(v) => polygon_directional_distance(v, [x[0], x[1]], [e[0], e[1]]),
        }
    }

    /// Euclidean distance from x to Ω^c.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        self.require_inside(x)?;
        Ok(self.boundary_distance_unchecked(x))
    }

    pub(crate) fn boundary_distance_unchecked(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::IntervalUnion(iv) => iv
                .iter()
                .find(|&&(a, b)| a < x[0] && x[0] < b)
                .map(|&(a, b)| (x[0] - a).min(b - x[0]))
                .unwrap_or(0.0),
            Shape::Ball { center, radius } => {
                let r: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                (radius - r).max(0.0)
            }
            Shape::AxisBox { min, max } => (0..self.dim)
                .map(|k| (x[k] - min[k]).min(max[k] - x[k]))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Shape::ConvexPolytope(hs) => hs
                .iter()
                .map(|h| h.offset - dot(&h.normal, x))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Shape::Polygon(v) => {
                let p = [x[0], x[1]];
                (0..v.len())
                    .map(|i| point_segment_distance(p, v[i], v[(i + 1) % v.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Even–odd crossing test with the half-open edge rule: a horizontal ray
/// through a vertex counts the vertex only for the edge whose other end lies
/// strictly above, which is the limit of rotating the ray by an infinitesimal
/// positive angle.
fn polygon_contains(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let scale = v.iter().fold(0.0_f64, |m, q| m.max(q[0].abs()).max(q[1].abs())).max(1.0);
    for i in 0..n {
        if point_segment_distance(p, v[i], v[(i + 1) % n]) <= 1e-14 * scale {
            return false;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_cross = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Smallest |t| with x + te on the polygon boundary (closed edges).
fn polygon_directional_distance(v: &[[f64; 2]], x: [f64; 2], e: [f64; 2]) -> f64 {
    let n = v.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = v[i];
        let d = sub2(v[(i + 1) % n], a);
        let r = sub2(a, x);
        let denom = cross2(e, d);
        let len = d[0].hypot(d[1]);
        if denom.abs() > 1e-14 * len {
            let t = cross2(r, d) / denom;
            let u = cross2(r, e) / denom;
            if (-1e-12..=1.0 + 1e-12).contains(&u) {
                best = best.min(t.abs());
            }
        } else if cross2(r, e).abs() <= 1e-14 * (len + r[0].hypot(r[1])) {
            // Collinear edge: the line runs along it.
            let t0 = r[0] * e[0] + r[1] * e[1];
            let t1 = t0 + d[0] * e[0] + d[1] * e[1];
            best = best.min(t0.abs()).min(t1.abs());
        }
    }
    best
}
