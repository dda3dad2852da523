//! Deterministic, nearly uniform direction sets on low-dimensional spheres.

use std::f64::consts::{PI, TAU};

use super::point::Point;
use crate::error::{domain, Result};

/// `count` unit vectors covering `S^{dim-1}` roughly uniformly.
///
/// Uniform angles on the circle, a Fibonacci spiral on `S^2`, and on `S^3` a
/// Kronecker lattice pushed through Hopf coordinates (the 3-D analogue of the
/// Fibonacci construction). Fails outside `dim` in `2..=4`.
pub fn sphere_grid(dim: usize, count: usize) -> Result<Vec<Point>> {
    if count == 0 {
        return domain("direction grid needs at least one direction");
    }
    match dim {
        2 => Ok(circle_grid(count)),
        3 => Ok(fibonacci_sphere(count)),
        4 => Ok(hopf_lattice(count)),
        _ => domain(format!("direction grids exist for dimensions 2..=4, got {dim}")),
    }
}

pub fn circle_grid(count: usize) -> Vec<Point> {
    (0..count)
        .map(|j| {
            let a = TAU * j as f64 / count as f64;
            Point::from([a.cos(), a.sin()])
        })
        .collect()
}

pub fn fibonacci_sphere(count: usize) -> Vec<Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            Point::from([r * a.cos(), r * a.sin(), z])
        })
        .collect()
}

pub fn hopf_lattice(count: usize) -> Vec<Point> {
    // Generalised golden ratios for a 3-D Kronecker sequence.
    let g = 1.220_744_084_605_759_5_f64;
    let steps = [1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)];
    (0..count)
        .map(|i| {
            let k = i as f64 + 0.5;
            let u = (k * steps[0]).fract();
            let a = TAU * (k * steps[1]).fract();
            let b = TAU * (k * steps[2]).fract();
            let (s, c) = (u.sqrt(), (1.0 - u).sqrt());
            Point::from([s * a.cos(), s * a.sin(), c * b.cos(), c * b.sin()])
        })
        .collect()
}

/// Point of `S^{n-1}` in hyperspherical coordinates `(phi_1, .., phi_{n-1})`:
/// `x_1 = cos phi_1`, `x_2 = sin phi_1 cos phi_2`, ..., `x_n = sin phi_1 .. sin phi_{n-1}`.
/// For `n = 2` this is `(cos phi, sin phi)`.
pub fn hyperspherical(angles: &[f64]) -> Point {
    let n = angles.len() + 1;
    let mut x = vec![0.0; n];
    let mut prod = 1.0;
    for (i, a) in angles.iter().enumerate() {
        x[i] = prod * a.cos();
        prod *= a.sin();
    }
    x[n - 1] = prod;
    Point::new(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_unit() {
        for dim in 2..=4 {
            for p in sphere_grid(dim, 500).unwrap() {
                assert!((p.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grids_cover_the_sphere() {
        // Every probe direction has a grid neighbour within a modest angle.
        for dim in 2..=4 {
            let grid = sphere_grid(dim, 4096).unwrap();
            let probes = sphere_grid(dim, 97).unwrap();
            for q in probes.iter().map(|p| p.scale(-1.0)) {
                let best = grid.iter().map(|g| g.dot(&q)).fold(-1.0, f64::max);
                assert!(best > 0.95, "dim {dim}: best cosine {best}");
            }
        }
    }

    #[test]
    fn hyperspherical_matches_circle() {
        let p = hyperspherical(&[0.3]);
        assert!((p[0] - 0.3f64.cos()).abs() < 1e-15 && (p[1] - 0.3f64.sin()).abs() < 1e-15);
        let q = hyperspherical(&[0.4, 1.1, 2.0]);
        assert!((q.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(sphere_grid(5, 10).is_err());
    }
}
