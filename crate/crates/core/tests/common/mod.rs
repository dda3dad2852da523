//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Smallest ball through the points of `subset` with center in their affine
/// hull, or `None` when they are affinely dependent.
fn circumball(subset: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = subset[0];
    let m = subset.len() - 1;
    if m == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let d = p0.len();
    // Center c = p0 + V a with |c - p_i| = |c - p0|: (V^T V) a = |v_i|^2 / 2.
    let v = DMatrix::from_fn(d, m, |r, c| subset[c + 1][r] - p0[r]);
    let gram = v.transpose() * &v;
    let rhs = DVector::from_fn(m, |i, _| 0.5 * v.column(i).norm_squared());
    let a = gram.lu().solve(&rhs)?;
    let offset = &v * a;
    let center: Vec<f64> = (0..d).map(|r| p0[r] + offset[r]).collect();
    Some((center, offset.norm()))
}

/// Minimum enclosing ball by exhausting all subsets of at most `d + 1`
/// points: the optimum is the circumball of its support set.
pub fn brute_force_ball(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let d = points[0].len();
    let n = points.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut idx = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        max: usize,
        idx: &mut Vec<usize>,
        points: &[Vec<f64>],
        best: &mut Option<(Vec<f64>, f64)>,
    ) {
        if !idx.is_empty() {
            let subset: Vec<&[f64]> = idx.iter().map(|&i| points[i].as_slice()).collect();
            if let Some((c, r)) = circumball(&subset) {
                let covers = points.iter().all(|p| {
                    let dist = p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    dist <= r * (1.0 + 1e-10) + 1e-12
                });
                if covers && best.as_ref().is_none_or(|b| r < b.1) {
                    *best = Some((c, r));
                }
            }
        }
        if idx.len() == max {
            return;
        }
        for i in start..n {
            idx.push(i);
            rec(i + 1, n, max, idx, points, best);
            idx.pop();
        }
    }
    rec(0, n, d + 1, &mut idx, points, &mut best);
    best.expect("some subset always encloses the cloud")
}
