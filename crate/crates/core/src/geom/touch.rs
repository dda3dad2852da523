//! A covering ball that touches a compact set outside a convex body.
//!
//! Given a convex compact `V = conv(generators)` and a compact `W` with
//! `W \ V` non-empty, build a closed ball `B` with `W ⊂ B` whose boundary
//! passes through a point of `W \ V`.
//!
//! Let `a ∈ W` maximise `dist(·, V)`, `b` its nearest point in `V`, `d` the
//! distance, and `e = (b - a)/d`. Every point of `W` satisfies
//! `<w - a, e> >= 0` and `V` lies in `{<x - a, e> >= d}`. Along the ray
//! `c(L) = a + L e` the balls centred at `c(L)` with the minimal covering radius
//! form a one-parameter family; once `L > max_v |v - a|^2 / (2 <v - a, e>)`
//! every point of `V` is strictly closer to `c(L)` than `a` is, so the farthest
//! point of `W`, which sits on the boundary, cannot lie in `V`.

use super::ball::Ball;
use super::hull::nearest_in_hull;
use super::point::{Point, PointCloud};
use crate::error::{domain, Result};

/// Minimum separation of `W` from `conv V` for the construction to apply.
pub const SEPARATION_TOL: f64 = 1e-9;

/// Ball `B` with `W ⊂ B` and `∂B ∩ (W \ conv V) ≠ ∅`, plus the touching point.
#[derive(Debug, Clone)]
pub struct TouchingBall {
    pub ball: Ball,
    pub contact: Point,
}

pub fn touching_ball(v: &PointCloud, w: &PointCloud) -> Result<TouchingBall> {
    if v.dim() != w.dim() {
        return domain("V and W have different dimensions");
    }
    let mut far: Option<(Point, Point, f64)> = None;
    for p in w {
        let (nearest, d) = nearest_in_hull(v, p)?;
        if far.as_ref().is_none_or(|f| d > f.2) {
            far = Some((p.clone(), nearest, d));
        }
    }
    let (a, b, d) = far.expect("W is non-empty");
    if d <= SEPARATION_TOL {
        return domain("nothing to separate: W lies inside conv V");
    }
    let e = b.sub(&a).scale(1.0 / d);

    let mut offset = d;
    for g in v {
        let rel = g.sub(&a);
        let along = rel.dot(&e);
        // `along >= d > 0` for every generator by the support property.
        offset = offset.max(rel.norm_squared() / (2.0 * along.max(d)));
    }
    let center = a.axpy(2.0 * offset, &e);

    let (contact, radius) = w
        .iter()
        .map(|p| (p, p.distance(&center)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(p, r)| (p.clone(), r))
        .unwrap();
    Ok(TouchingBall { ball: Ball::new(center, radius)?, contact })
}

/// The ball alone.
pub fn lemma2_touch_ball(v: &PointCloud, w: &PointCloud) -> Result<Ball> {
    touching_ball(v, w).map(|t| t.ball)
}
