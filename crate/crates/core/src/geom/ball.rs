//! Minimum enclosing balls.
//!
//! Clouds with more than [`BRUTE_FORCE_LIMIT`] points go through the
//! move-to-front variant of Welzl's randomized incremental algorithm. The
//! processing order is a shuffle drawn from a fixed seed, so results are
//! reproducible bit for bit. Small clouds, and support sets that turn out to be
//! affinely dependent, are resolved by enumerating circumballs of subsets.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::point::{Point, PointCloud};
use crate::error::{domain, Result};

/// Clouds up to this size are solved by exhaustive subset enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 6;

const SHUFFLE_SEED: u64 = 0x5eed_ba11;

/// Relative containment slack used while building the ball.
const BUILD_TOL: f64 = 1e-13;

/// Relative containment tolerance guaranteed by [`min_enclosing_ball`].
pub const CONTAIN_TOL: f64 = 1e-12;

/// A closed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return domain(format!("ball radius must be finite and >= 0, got {radius}"));
        }
        if !center.is_finite() {
            return domain("ball center must be finite");
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Whether `p` lies in the ball up to an absolute slack.
    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        self.center.distance(p) <= self.radius + slack
    }

    /// Whether every point of `cloud` lies in the ball up to `rel_tol * (1 + radius)`.
    pub fn contains_all(&self, cloud: &PointCloud, rel_tol: f64) -> bool {
        let slack = rel_tol * (1.0 + self.radius);
        cloud.iter().all(|p| self.contains(p, slack))
    }
}

/// Smallest ball containing `cloud`.
pub fn min_enclosing_ball(cloud: &PointCloud) -> Result<Ball> {
    let dim = cloud.dim();
    if dim > 5 {
        return domain(format!("enclosing balls are supported up to dimension 5, got {dim}"));
    }
    let pts = cloud.points();
    if pts.len() <= BRUTE_FORCE_LIMIT {
        return Ok(brute_force_ball(pts));
    }

    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));
    let mut mtf = MoveToFront { pts, order, dim };

    let mut ball = mtf.run();
    // Rounding can leave a point marginally outside; pull the worst offender
    // to the front and rerun until the ball is clean.
    for _ in 0..16 {
        let slack = CONTAIN_TOL * (1.0 + ball.radius);
        let worst = mtf
            .order
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, ball.center.distance(&pts[i]) - ball.radius))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((pos, excess)) if excess > slack => {
                let idx = mtf.order.remove(pos);
                mtf.order.insert(0, idx);
                ball = mtf.run();
            }
            _ => break,
        }
    }
    Ok(ball)
}

struct MoveToFront<'a> {
    pts: &'a [Point],
    order: Vec<usize>,
    dim: usize,
}

impl MoveToFront<'_> {
    fn run(&mut self) -> Ball {
        let mut support = Vec::with_capacity(self.dim + 1);
        self.recurse(self.order.len(), &mut support).expect("non-empty cloud yields a ball")
    }

    fn recurse(&mut self, end: usize, support: &mut Vec<usize>) -> Option<Ball> {
        let mut ball = self.support_ball(support);
        if support.len() == self.dim + 1 {
            return ball;
        }
        let mut i = 0;
        while i < end {
            let idx = self.order[i];
            let outside = match &ball {
                None => true,
                Some(b) => !b.contains(&self.pts[idx], BUILD_TOL * (1.0 + b.radius)),
            };
            if outside {
                support.push(idx);
                ball = self.recurse(i, support);
                support.pop();
                self.order.remove(i);
                self.order.insert(0, idx);
            }
            i += 1;
        }
        ball
    }

    fn support_ball(&self, support: &[usize]) -> Option<Ball> {
        if support.is_empty() {
            return None;
        }
        let pts: Vec<&Point> = support.iter().map(|&i| &self.pts[i]).collect();
        Some(circumball(&pts).unwrap_or_else(|| {
            let owned: Vec<Point> = pts.into_iter().cloned().collect();
            brute_force_ball(&owned)
        }))
    }
}

/// Smallest ball with every given point on its boundary and its center in their
/// affine hull, or `None` when the points are affinely dependent.
pub(crate) fn circumball(pts: &[&Point]) -> Option<Ball> {
    let p0 = pts[0];
    if pts.len() == 1 {
        return Some(Ball { center: p0.clone(), radius: 0.0 });
    }
    let qs: Vec<Point> = pts[1..].iter().map(|p| p.sub(p0)).collect();
    let k = qs.len();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * qs[i].dot(&qs[j]));
    let rhs = DVector::from_fn(k, |i, _| qs[i].norm_squared());

    let eig = gram.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-13 * max {
        return None;
    }
    let lambda = gram.cholesky()?.solve(&rhs);
    let mut center = p0.clone();
    for (q, l) in qs.iter().zip(lambda.iter()) {
        center = center.axpy(*l, q);
    }
    let radius = pts.iter().map(|p| center.distance(p)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

/// Enumerates circumballs of all subsets of at most `dim + 1` points and keeps
/// the smallest one that contains the whole set.
pub(crate) fn brute_force_ball(pts: &[Point]) -> Ball {
    let dim = pts[0].dim();
    let m = pts.len();
    let max_size = (dim + 1).min(m);
    let mut best: Option<Ball> = None;
    let mut subset = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        for_each_subset(m, size, &mut subset, 0, &mut |idx: &[usize]| {
            let refs: Vec<&Point> = idx.iter().map(|&i| &pts[i]).collect();
            let Some(ball) = circumball(&refs) else { return };
            if best.as_ref().is_some_and(|b| ball.radius >= b.radius) {
                return;
            }
            let slack = BUILD_TOL * 10.0 * (1.0 + ball.radius);
            if pts.iter().all(|p| ball.contains(p, slack)) {
                best = Some(ball);
            }
        });
    }
    best.unwrap_or_else(|| {
        // Only reachable through pathological rounding; fall back to a ball
        // around the first point that covers everything.
        let center = pts[0].clone();
        let radius = pts.iter().map(|p| center.distance(p)).fold(0.0, f64::max);
        Ball { center, radius }
    })
}

fn for_each_subset(
    m: usize,
    size: usize,
    current: &mut Vec<usize>,
    start: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if current.len() == size {
        f(current);
        return;
    }
    for i in start..m {
        if m - i < size - current.len() {
            break;
        }
        current.push(i);
        for_each_subset(m, size, current, i + 1, f);
        current.pop();
    }
}
