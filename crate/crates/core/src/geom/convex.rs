//! Support functions and the Minkowski-family inclusion test.

use super::point::{Point, PointCloud};
use crate::error::{domain, Result};

const UNIT_TOL: f64 = 1e-12;

/// `h_K(u) = max_{x in K} <x, u>` for a unit direction `u`.
pub fn support_value(cloud: &PointCloud, direction: &Point) -> Result<f64> {
    if direction.dim() != cloud.dim() {
        return domain(format!(
            "direction has dimension {}, cloud has {}",
            direction.dim(),
            cloud.dim()
        ));
    }
    let norm = direction.norm();
    if norm == 0.0 {
        return domain("support direction is zero");
    }
    if (norm - 1.0).abs() > UNIT_TOL {
        return domain(format!("support direction must be unit, |u| = {norm}"));
    }
    Ok(support_unchecked(cloud, direction))
}

pub(crate) fn support_unchecked(cloud: &PointCloud, u: &Point) -> f64 {
    cloud.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

/// Largest sampled excess `h_A(u) - t h_B(u) - (1-t) h_C(u)`.
///
/// Support functions add under Minkowski sums and scale with positive
/// dilations, so a non-positive value certifies
/// `conv A ⊂ t conv B ⊕ (1-t) conv C` along every sampled direction.
pub fn family_convexity_violation(
    a: &PointCloud,
    b: &PointCloud,
    c: &PointCloud,
    t: f64,
    directions: &[Point],
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("t must lie in [0,1], got {t}"));
    }
    if directions.is_empty() {
        return domain("no directions supplied");
    }
    let dim = a.dim();
    if b.dim() != dim || c.dim() != dim {
        return domain("family members have different dimensions");
    }
    let mut worst = f64::NEG_INFINITY;
    for u in directions {
        let excess = support_value(a, u)? - t * support_value(b, u)? - (1.0 - t) * support_value(c, u)?;
        worst = worst.max(excess);
    }
    Ok(worst)
}
