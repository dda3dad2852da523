//! Distance to a convex hull by Wolfe's minimum-norm-point algorithm.
//!
//! The distance from `q` to `conv P` equals the largest support excess
//! `max_{|u|=1} <q,u> - h_P(u)`, so the same routine answers hull membership
//! and projection queries in any small dimension.

use nalgebra::{DMatrix, DVector};

use super::point::{Point, PointCloud};
use crate::error::{domain, Result};

const MAX_MAJOR: usize = 10_000;

/// Nearest point of `conv(cloud)` to `query` together with the distance.
pub fn nearest_in_hull(cloud: &PointCloud, query: &Point) -> Result<(Point, f64)> {
    if cloud.dim() != query.dim() {
        return domain(format!(
            "query has dimension {}, hull has {}",
            query.dim(),
            cloud.dim()
        ));
    }
    let shifted: Vec<Point> = cloud.iter().map(|p| p.sub(query)).collect();
    let (x, _) = min_norm_point(&shifted);
    let dist = x.norm();
    Ok((x.add(query), dist))
}

/// Distance from `query` to `conv(cloud)`.
pub fn hull_distance(cloud: &PointCloud, query: &Point) -> Result<f64> {
    nearest_in_hull(cloud, query).map(|(_, d)| d)
}

/// Whether `query` lies in `conv(cloud)` up to `tol`: equivalently, whether
/// `<query,u> <= h(u) + tol` for every unit direction `u`.
pub fn hull_contains(cloud: &PointCloud, query: &Point, tol: f64) -> Result<bool> {
    Ok(hull_distance(cloud, query)? <= tol)
}

/// Minimum-norm point of the convex hull of `pts`; returns the point and the
/// barycentric weights of its active set.
fn min_norm_point(pts: &[Point]) -> (Point, Vec<(usize, f64)>) {
    let scale = pts.iter().map(Point::norm_squared).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let z1 = 1e-12 * scale;

    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_squared().total_cmp(&pts[b].norm_squared()))
        .unwrap();
    let mut active: Vec<(usize, f64)> = vec![(start, 1.0)];
    let mut x = pts[start].clone();

    for _ in 0..MAX_MAJOR {
        let xx = x.norm_squared();
        if xx <= z1 * 1e-12 {
            break;
        }
        let (j, xj) = (0..pts.len())
            .map(|j| (j, x.dot(&pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xj > xx - z1 || active.iter().any(|&(i, _)| i == j) {
            break;
        }
        active.push((j, 0.0));

        // Minor cycles: move toward the affine minimizer of the active set,
        // dropping points whose weight would turn negative.
        loop {
            let idx: Vec<usize> = active.iter().map(|&(i, _)| i).collect();
            let Some(alpha) = affine_min_norm(pts, &idx) else {
                active.pop();
                return (combine(pts, &active), active);
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                for (slot, a) in active.iter_mut().zip(&alpha) {
                    slot.1 = *a;
                }
                break;
            }
            let mut theta = 1.0_f64;
            for ((_, lam), &a) in active.iter().zip(&alpha) {
                if a <= 1e-14 {
                    let denom = lam - a;
                    if denom > 0.0 {
                        theta = theta.min(lam / denom);
                    }
                }
            }
            for (slot, &a) in active.iter_mut().zip(&alpha) {
                slot.1 = (1.0 - theta) * slot.1 + theta * a;
            }
            active.retain(|&(_, lam)| lam > 1e-14);
            if !active.iter().any(|&(i, _)| i == j) {
                // The entering point was rejected immediately: no progress is possible.
                if active.is_empty() {
                    active.push((j, 1.0));
                }
                let total: f64 = active.iter().map(|&(_, l)| l).sum();
                for slot in active.iter_mut() {
                    slot.1 /= total;
                }
                return (combine(pts, &active), active);
            }
            let total: f64 = active.iter().map(|&(_, l)| l).sum();
            for slot in active.iter_mut() {
                slot.1 /= total;
            }
            if active.len() == 1 {
                active[0].1 = 1.0;
                break;
            }
        }
        x = combine(pts, &active);
    }
    (x, active)
}

fn combine(pts: &[Point], active: &[(usize, f64)]) -> Point {
    let mut x = Point::zeros(pts[0].dim());
    for &(i, l) in active {
        x = x.axpy(l, &pts[i]);
    }
    x
}

/// Barycentric weights of the minimum-norm point of the affine hull of
/// `pts[idx]`, or `None` if the active points are affinely dependent.
fn affine_min_norm(pts: &[Point], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let p0 = &pts[idx[0]];
    let diffs: Vec<Point> = idx[1..].iter().map(|&i| pts[i].sub(p0)).collect();
    let m = k - 1;
    let gram = DMatrix::from_fn(m, m, |a, b| diffs[a].dot(&diffs[b]));
    let rhs = DVector::from_fn(m, |a, _| -diffs[a].dot(p0));
    let trace: f64 = (0..m).map(|a| gram[(a, a)]).sum();
    let chol = gram.cholesky()?;
    let diag_min = (0..m).map(|a| chol.l_dirty()[(a, a)].powi(2)).fold(f64::INFINITY, f64::min);
    if diag_min <= 1e-14 * trace {
        return None;
    }
    let c = chol.solve(&rhs);
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - c.iter().sum::<f64>());
    alpha.extend(c.iter());
    Some(alpha)
}
