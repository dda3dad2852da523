//! The contact-spread functional of a compact set and its circumscribed ball.
//!
//! `sigma(E) = min_{|y|=1} max_{b in dB ∩ E} <b - xi, y> / R`
//!
//! The minimum over the sphere is taken on a fixed direction grid and then
//! polished by Nelder–Mead from the best grid points. The objective is a
//! maximum of linear functions restricted to the sphere, so the polished value
//! is a (tight) upper estimate of the true minimum; the grid value alone can
//! only be larger.

use super::ball::Ball;
use super::directions::sphere_grid;
use super::point::{Point, PointCloud};
use crate::error::{domain, Result};
use crate::optim::nelder_mead;

/// Number of grid directions scanned before refinement.
pub const SIGMA_GRID: usize = 4096;

/// Default relative thickness of the contact shell `| |b - xi| - R | <= tol R`.
pub const DEFAULT_CONTACT_TOL: f64 = 1e-6;

/// A negative minimum beyond this means `ball` is not the circumscribed ball.
const NEGATIVE_SLACK: f64 = 1e-6;

const STARTS: usize = 4;

/// Contact points of `cloud` with the boundary sphere of `ball`.
pub fn contact_set(cloud: &PointCloud, ball: &Ball, contact_tol: f64) -> Vec<Point> {
    cloud
        .iter()
        .filter(|b| (b.distance(&ball.center) - ball.radius).abs() <= contact_tol * ball.radius)
        .cloned()
        .collect()
}

pub fn sigma(cloud: &PointCloud, ball: &Ball, contact_tol: f64) -> Result<f64> {
    let dim = cloud.dim();
    if ball.dim() != dim {
        return domain("ball and cloud dimensions differ");
    }
    if !(ball.radius > 0.0) {
        return domain("sigma is undefined for a zero-radius ball");
    }
    let slack = contact_tol * ball.radius + 1e-12 * (1.0 + ball.radius);
    if cloud.iter().any(|p| p.distance(&ball.center) > ball.radius + slack) {
        return domain("ball is not circumscribed: it misses points of the cloud");
    }
    let contacts = contact_set(cloud, ball, contact_tol);
    if contacts.is_empty() {
        return domain("contact set is empty");
    }
    let units: Vec<Point> = contacts
        .iter()
        .map(|b| b.sub(&ball.center).scale(1.0 / ball.radius))
        .collect();

    let value = min_max_over_sphere(&units, dim)?;
    if value < -NEGATIVE_SLACK {
        return domain(format!(
            "ball is not circumscribed: contact points lie in an open hemisphere (sigma = {value:e})"
        ));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `min_{|y|=1} max_i <c_i, y>`.
pub(crate) fn min_max_over_sphere(units: &[Point], dim: usize) -> Result<f64> {
    if dim == 2 {
        return Ok(min_max_on_circle(units));
    }
    min_max_by_search(units, dim)
}

/// Grid scan followed by Nelder–Mead polishing; any dimension.
fn min_max_by_search(units: &[Point], dim: usize) -> Result<f64> {
    let objective = |y: &Point| units.iter().map(|c| c.dot(y)).fold(f64::NEG_INFINITY, f64::max);
    let grid = sphere_grid(dim, SIGMA_GRID)?;
    let mut scored: Vec<(f64, &Point)> = grid.iter().map(|y| (objective(y), y)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].0;

    // Initial simplex edge comparable to the grid spacing.
    let step = 2.0 * (SIGMA_GRID as f64).powf(-1.0 / (dim as f64 - 1.0));
    for &(_, y0) in scored.iter().take(STARTS) {
        let f = |v: &[f64]| {
            let p = Point::new(v.to_vec());
            match p.normalized() {
                Some(y) => objective(&y),
                None => f64::INFINITY,
            }
        };
        let (_, v) = nelder_mead(f, y0.coords(), step, 1e-12, 4000);
        best = best.min(v);
    }
    Ok(best)
}

/// On the circle the minimising `y` bisects the widest gap `g` between
/// consecutive contact directions, giving `cos(g / 2)`.
fn min_max_on_circle(units: &[Point]) -> f64 {
    let mut angles: Vec<f64> = units.iter().map(|c| c[1].atan2(c[0])).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    let gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    (0.5 * gap).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::directions::circle_grid;

    fn unit_ball(dim: usize) -> Ball {
        Ball::new(Point::zeros(dim), 1.0).unwrap()
    }

    #[test]
    fn circle_formula_matches_search() {
        let sets: [&[f64]; 4] = [&[0.0, 2.0, 4.0], &[0.1, 0.2, 3.3, 4.9], &[1.0, 2.5, 4.0, 5.5, 6.0], &[0.0, 3.0]];
        for angles in sets {
            let units: Vec<Point> = angles.iter().map(|a| Point::from([a.cos(), a.sin()])).collect();
            let exact = min_max_on_circle(&units);
            let searched = min_max_by_search(&units, 2).unwrap();
            assert!((exact - searched).abs() < 1e-9, "{angles:?}: {exact} vs {searched}");
        }
    }

    #[test]
    fn antipodal_pair_is_zero() {
        let c = PointCloud::from_coords(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        assert!(sigma(&c, &unit_ball(2), 1e-6).unwrap().abs() < 1e-9);
    }

    #[test]
    fn four_axis_points() {
        let c = PointCloud::from_coords(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
        let s = sigma(&c, &unit_ball(2), 1e-6).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 1e-9, "{s}");
    }

    #[test]
    fn dense_circle_is_nearly_one() {
        let c = PointCloud::new(circle_grid(2000)).unwrap();
        let s = sigma(&c, &unit_ball(2), 1e-6).unwrap();
        let exact = (std::f64::consts::PI / 2000.0).cos();
        assert!((s - exact).abs() < 1e-9, "{s} vs {exact}");
    }

    #[test]
    fn interior_points_are_ignored() {
        let c = PointCloud::from_coords(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5]]).unwrap();
        assert!(sigma(&c, &unit_ball(2), 1e-6).unwrap().abs() < 1e-9);
    }

    #[test]
    fn octahedron_in_three_dimensions() {
        let c = PointCloud::from_coords(&[
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ])
        .unwrap();
        let s = sigma(&c, &unit_ball(3), 1e-6).unwrap();
        assert!((s - 1.0 / 3f64.sqrt()).abs() < 1e-8, "{s}");
    }

    #[test]
    fn not_circumscribed() {
        let c = PointCloud::from_coords(&[[2.0, 0.0], [-1.0, 0.0]]).unwrap();
        assert!(sigma(&c, &unit_ball(2), 1e-6).is_err());
        // A ball that contains the set but is not minimal: the contacts sit in
        // one hemisphere.
        let c = PointCloud::from_coords(&[[1.0, 0.0], [0.0, 0.5]]).unwrap();
        assert!(sigma(&c, &unit_ball(2), 1e-6).is_err());
    }

    #[test]
    fn empty_contact_set() {
        let c = PointCloud::from_coords(&[[0.1, 0.0]]).unwrap();
        assert!(sigma(&c, &unit_ball(2), 1e-6).is_err());
    }
}
