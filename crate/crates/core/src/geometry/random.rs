//! Random convex test domains and interior sampling.

use rand::Rng;

use super::Domain;

/// Convex polygon with vertices on a random rotated ellipse.
pub fn convex_polygon<R: Rng>(rng: &mut R, vertices: usize) -> Domain {
    let n = vertices.max(3);
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        angles.sort_by(f64::total_cmp);
        let (a, b) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let rot: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let (cx, cy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let pts: Vec<[f64; 2]> = angles
            .iter()
            .map(|&t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                [cx + x * rot.cos() - y * rot.sin(), cy + x * rot.sin() + y * rot.cos()]
            })
            .collect();
        if let Ok(d) = Domain::polygon(pts) {
            if d.is_convex() {
                return d;
            }
        }
    }
}

/// Bounded convex polytope around the origin from `faces` random half-spaces.
pub fn convex_polytope<R: Rng>(rng: &mut R, dim: usize, faces: usize) -> Domain {
    loop {
        let hs: Vec<(Vec<f64>, f64)> = (0..faces)
            .map(|_| {
                let n: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                (n, rng.random_range(0.5..1.5))
            })
            .filter(|(n, _)| n.iter().map(|c| c * c).sum::<f64>() > 1e-3)
            .collect();
        if let Ok(d) = Domain::convex_polytope(hs) {
            return d;
        }
    }
}

/// Uniform rejection sample from Ω with boundary distance at least `margin`.
pub fn interior_point<R: Rng>(rng: &mut R, domain: &Domain, margin: f64) -> Vec<f64> {
    let (lo, hi) = domain.bounding_box();
    loop {
        let x: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.random_range(*a..*b)).collect();
        if domain.contains_unchecked(&x) && domain.boundary_distance_unchecked(&x) >= margin {
            return x;
        }
    }
}
