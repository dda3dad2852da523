use rand::{seq::index::sample, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::section::Section;
use super::series::{differences, truncation_estimate, SeriesBundle};
use crate::error::{domain, Result};
use crate::geom::{directions::sphere_grid, family_convexity_violation, hull_distance, PointCloud};
use crate::profile::{c_beta, ModelSurface};
use crate::report::{json_f64, CheckReport};

pub const CURVATURE_IDENTITY: &str = "curvature-identity";
pub const GAUSS_MAP: &str = crate::gauss_map::GAUSS_MAP_CHECK;
pub const R_CONVEXITY: &str = "r-convexity";
pub const FAMILY_CONVEXITY: &str = "family-convexity";
pub const DELTA_CONVEXITY: &str = "delta-convexity";
pub const TUBE_INEQUALITY: &str = "tube-inequality";
pub const LIFETIME_BOUND: &str = "lifetime-bound";
pub const RHO_INEQUALITY: &str = "rho-inequality";
pub const MAX_PRINCIPLE: &str = "max-principle";

/// Every check, in report order.
pub const ALL_CHECKS: [&str; 9] = [
    CURVATURE_IDENTITY,
    GAUSS_MAP,
    R_CONVEXITY,
    FAMILY_CONVEXITY,
    DELTA_CONVEXITY,
    TUBE_INEQUALITY,
    LIFETIME_BOUND,
    RHO_INEQUALITY,
    MAX_PRINCIPLE,
];

const GRID_NOTE: &str = "second differences on interior grid nodes; a statement that holds almost \
                         everywhere is indistinguishable on a grid from one that holds everywhere";

fn require_grid(bundle: &SeriesBundle, min: usize) -> Result<()> {
    if bundle.len() < min {
        return domain(format!("need at least {min} sections, got {}", bundle.len()));
    }
    if !bundle.is_uniform() {
        return domain("the tau grid must be uniform");
    }
    Ok(())
}

fn second_difference(v: &[f64], h: f64, k: usize) -> f64 {
    (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (h * h)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest `-D^2 v / scale` over the interior, clamped at zero, with its node.
fn concavity(v: &[f64], h: f64, scale: f64) -> (f64, usize) {
    (1..v.len() - 1)
        .map(|k| (-second_difference(v, h, k) / scale, k))
        .fold((0.0, 0), |best, c| if c.0 > best.0 { c } else { best })
}

/// `R'' >= 0` by second differences, relative to `max(1, max |R|)`.
pub fn check_r_convexity(bundle: &SeriesBundle, tol: f64) -> Result<CheckReport> {
    require_grid(bundle, 3)?;
    let scale = max_abs(&bundle.r).max(1.0);
    let (v, k) = concavity(&bundle.r, bundle.h(), scale);
    Ok(CheckReport::decided(R_CONVEXITY, "R''(tau) >= 0", v, tol)
        .with("scale", scale)
        .with("worst_tau", if v > 0.0 { json_f64(bundle.tau[k]) } else { serde_json::Value::Null })
        .with("interior_nodes", bundle.len() - 2)
        .with("note", GRID_NOTE))
}

/// `conv S(tau_0) ⊂ t conv S(tau_1) ⊕ (1-t) conv S(tau_2)` for random
/// `tau_1 < tau_0 < tau_2` with `tau_0 = t tau_1 + (1-t) tau_2`.
///
/// Sections are compared as the polytopes spanned by their samples. That is
/// exact for sections sampled along a shared direction grid; sections cut at
/// unrelated points need a tolerance of the order of their chord sagitta.
pub fn check_family_convexity(sections: &[Section], trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    if sections.len() < 3 {
        return domain(format!("need at least 3 sections, got {}", sections.len()));
    }
    if trials == 0 {
        return domain("family convexity needs at least one trial");
    }
    let n = sections[0].points.dim();
    let count = match n {
        2 => 256,
        3 => 1024,
        _ => 2048,
    };
    let dirs = sphere_grid(n, count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[usize; 3]> = (0..trials)
        .map(|_| {
            let mut idx = sample(&mut rng, sections.len(), 3).into_vec();
            idx.sort_unstable();
            [idx[0], idx[1], idx[2]]
        })
        .collect();
    let scale = sections.iter().map(|s| s.ball.radius).fold(1.0, f64::max);
    let excess: Vec<(f64, [usize; 3], f64)> = triples
        .par_iter()
        .map(|&[i1, i0, i2]| {
            let (s1, s0, s2) = (&sections[i1], &sections[i0], &sections[i2]);
            let t = (s2.tau - s0.tau) / (s2.tau - s1.tau);
            let v = family_convexity_violation(&s0.points, &s1.points, &s2.points, t, &dirs)?;
            Ok((v / scale, [i1, i0, i2], t))
        })
        .collect::<Result<_>>()?;
    let worst = excess.iter().cloned().fold((f64::NEG_INFINITY, [0; 3], 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let v = worst.0.max(0.0);
    let [i1, i0, i2] = worst.1;
    Ok(CheckReport::decided(FAMILY_CONVEXITY, "h_{S(t a + (1-t) b)} <= t h_{S(a)} + (1-t) h_{S(b)}", v, tol)
        .with("trials", trials)
        .with("directions", dirs.len())
        .with("seed", seed)
        .with("scale", scale)
        .with(
            "worst_triple",
            serde_json::json!({
                "tau_1": sections[i1].tau, "tau_0": sections[i0].tau, "tau_2": sections[i2].tau, "t": worst.2
            }),
        ))
}

/// With `eps = min sigma > 0`, both `R / eps - xi_k` and `R / eps + xi_k` are
/// convex for every coordinate `k`, so `xi` is a difference of convex curves.
pub fn check_delta_convexity(bundle: &SeriesBundle, tol: f64) -> Result<CheckReport> {
    const STATEMENT: &str = "R / eps -+ xi_k convex, eps = min sigma";
    if !(bundle.epsilon > 0.0) {
        return Ok(CheckReport::skipped(DELTA_CONVEXITY, STATEMENT, "min sigma over the sections is zero")
            .with("epsilon", json_f64(bundle.epsilon)));
    }
    require_grid(bundle, 3)?;
    let eps = bundle.epsilon;
    let h = bundle.h();
    let n = bundle.xi[0].dim();
    let r_over: Vec<f64> = bundle.r.iter().map(|r| r / eps).collect();
    let xi_max = bundle.xi.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = max_abs(&r_over).max(xi_max).max(1.0);
    let mut worst = (0.0, 0usize, 1.0);
    for k in 0..n {
        let xk = bundle.xi_component(k);
        for sign in [1.0, -1.0] {
            let psi: Vec<f64> = r_over.iter().zip(&xk).map(|(r, x)| r - sign * x).collect();
            let (v, _) = concavity(&psi, h, scale);
            if v > worst.0 {
                worst = (v, k, sign);
            }
        }
    }
    Ok(CheckReport::decided(DELTA_CONVEXITY, STATEMENT, worst.0, tol)
        .with("epsilon", eps)
        .with("scale", scale)
        .with("worst_coordinate", worst.1)
        .with("worst_sign", if worst.2 > 0.0 { "-" } else { "+" })
        .with("note", GRID_NOTE))
}

/// Per-node residual of a second-order differential inequality, normalized,
/// with a truncation estimate for the resolution guard.
struct NodeResidual {
    k: usize,
    residual: f64,
    truncation: f64,
    scale: f64,
}

fn ode_residuals(v: &[f64], xi_sq: impl Fn(usize) -> f64, h: f64, beta: f64, xi_weight: f64) -> Vec<NodeResidual> {
    (1..v.len() - 1)
        .map(|k| {
            let d = differences(v, h, k);
            let lhs = v[k] * d.d2;
            let rhs = beta * (1.0 + d.d1 * d.d1);
            let scale = lhs.abs().max(rhs).max(1.0);
            NodeResidual {
                k,
                residual: (lhs - rhs - xi_weight * xi_sq(k)) / scale,
                truncation: truncation_estimate(&d, v[k], h, beta, scale),
                scale,
            }
        })
        .collect()
}

fn dxi_squared(bundle: &SeriesBundle, k: usize) -> f64 {
    let h = bundle.h();
    bundle.xi[k + 1].sub(&bundle.xi[k - 1]).norm_squared() / (4.0 * h * h)
}

/// `R R'' >= beta (1 + R'^2) + |xi'|^2 min(beta, 1)` at interior nodes whose
/// estimated truncation error is at most `resolution`.
///
/// Reports the largest normalized `|residual|` as the equality gap.
pub fn check_tube_inequality(bundle: &SeriesBundle, beta: f64, tol: f64, resolution: f64) -> Result<CheckReport> {
    const STATEMENT: &str = "R R'' >= beta (1 + R'^2) + |xi'|^2 min(beta, 1)";
    require_grid(bundle, 3)?;
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    let all = ode_residuals(&bundle.r, |k| dxi_squared(bundle, k), bundle.h(), beta, beta.min(1.0));
    let total = all.len();
    let resolved: Vec<&NodeResidual> = all.iter().filter(|r| r.truncation <= resolution).collect();
    if resolved.is_empty() {
        return Ok(CheckReport::decided(TUBE_INEQUALITY, STATEMENT, f64::INFINITY, tol)
            .with("resolved_nodes", 0)
            .with("excluded_nodes", total)
            .with("reason", "no interior node is resolved by the grid"));
    }
    let min = resolved.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let gap = resolved.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    let abs_gap = resolved.iter().map(|r| (r.residual * r.scale).abs()).fold(0.0, f64::max);
    let taus: Vec<f64> = resolved.iter().map(|r| bundle.tau[r.k]).collect();
    Ok(CheckReport::decided(TUBE_INEQUALITY, STATEMENT, (-min).max(0.0), tol)
        .with("beta", beta)
        .with("min_residual", min)
        .with("max_equality_gap", gap)
        .with("max_abs_equality_gap", abs_gap)
        .with("resolved_nodes", resolved.len())
        .with("excluded_nodes", total - resolved.len())
        .with("resolved_tau_range", serde_json::json!([taus[0], taus[taus.len() - 1]]))
        .with("resolution", resolution)
        .with("note", GRID_NOTE))
}

/// `tau_max - tau_min <= 2 c_beta min R`, for `beta > 1`. The grid can place
/// the measured ends up to a step beyond the true ones on each side, so the
/// tolerance is `tol + 2h`.
pub fn check_lifetime_bound(bundle: &SeriesBundle, beta: f64, tol: f64) -> Result<CheckReport> {
    const STATEMENT: &str = "span <= 2 c_beta min R";
    if !(beta > 1.0) {
        return Ok(CheckReport::skipped(LIFETIME_BOUND, STATEMENT, "beta <= 1: the tube may be infinite")
            .with("beta", beta));
    }
    require_grid(bundle, 2)?;
    let c = c_beta(beta)?;
    let r_min = bundle.r.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = 2.0 * c * r_min;
    let span = bundle.span();
    Ok(CheckReport::decided(LIFETIME_BOUND, STATEMENT, span - bound, tol + 2.0 * bundle.h())
        .with("beta", beta)
        .with("c_beta", c)
        .with("min_radius", r_min)
        .with("span", span)
        .with("bound", bound)
        .with("ratio", span / bound))
}

/// `rho rho'' >= (n - 1)(1 + rho'^2)` on the outer-radius series, reported
/// beside the tube-inequality residual at `beta = n - 1`. Only meaningful
/// for `p = 2`; skipped otherwise.
pub fn check_rho_inequality(bundle: &SeriesBundle, p: f64, tol: f64, resolution: f64) -> Result<CheckReport> {
    const STATEMENT: &str = "rho rho'' >= (n - 1)(1 + rho'^2)";
    if (p - 2.0).abs() > 1e-12 {
        return Ok(CheckReport::skipped(RHO_INEQUALITY, STATEMENT, "applies to p = 2 only").with("p", p));
    }
    require_grid(bundle, 3)?;
    let n = bundle.xi[0].dim();
    let beta = (n - 1) as f64;
    let h = bundle.h();
    let rho = ode_residuals(&bundle.rho, |_| 0.0, h, beta, 0.0);
    let tube = ode_residuals(&bundle.r, |k| dxi_squared(bundle, k), h, beta, 1.0);
    let total = rho.len();
    let pairs: Vec<(&NodeResidual, &NodeResidual)> = rho
        .iter()
        .zip(&tube)
        .filter(|(a, b)| a.truncation <= resolution && b.truncation <= resolution)
        .collect();
    if pairs.is_empty() {
        return Ok(CheckReport::decided(RHO_INEQUALITY, STATEMENT, f64::INFINITY, tol)
            .with("resolved_nodes", 0)
            .with("excluded_nodes", total)
            .with("reason", "no interior node is resolved by the grid"));
    }
    let min = pairs.iter().map(|(a, _)| a.residual).fold(f64::INFINITY, f64::min);
    let max_rho = pairs.iter().map(|(a, _)| a.residual.abs()).fold(0.0, f64::max);
    let max_tube = pairs.iter().map(|(_, b)| b.residual.abs()).fold(0.0, f64::max);
    let diff = pairs.iter().map(|(a, b)| (a.residual - b.residual).abs()).fold(0.0, f64::max);
    Ok(CheckReport::decided(RHO_INEQUALITY, STATEMENT, (-min).max(0.0), tol)
        .with("n", n)
        .with("min_residual", min)
        .with("max_abs_rho_residual", max_rho)
        .with("max_abs_tube_residual", max_tube)
        .with("max_residual_difference", diff)
        .with("resolved_nodes", pairs.len())
        .with("excluded_nodes", total - pairs.len())
        .with("resolution", resolution)
        .with("note", GRID_NOTE))
}

/// Every sampled point strictly between the sections at grid indices `k1`
/// and `k2` lies in the convex hull of those two sections in `R^{n+1}`.
///
/// `inner_samples` evenly spaced sections are tested. All sections share the
/// direction grid of the model, so a convex radius keeps every inner sample
/// inside the hull exactly and no sampling slack is granted.
pub fn check_max_principle(
    surface: &ModelSurface,
    k1: usize,
    k2: usize,
    inner_samples: usize,
    tol: f64,
) -> Result<CheckReport> {
    const STATEMENT: &str = "conv x(M between a, b) ⊂ conv (S(a) ∪ S(b))";
    let len = surface.profile.len();
    if !(k1 + 1 < k2 && k2 < len) {
        return domain(format!("need k1 + 1 < k2 < {len}, got k1 = {k1}, k2 = {k2}"));
    }
    if inner_samples == 0 {
        return domain("max principle needs at least one inner section");
    }
    let hull = PointCloud::new(surface.section(k1).iter().chain(surface.section(k2)).cloned().collect())?;
    let gap = k2 - k1 - 1;
    let count = inner_samples.min(gap);
    let mut inner: Vec<usize> = (0..count)
        .map(|i| k1 + 1 + ((i as f64 + 0.5) * gap as f64 / count as f64) as usize)
        .collect();
    inner.dedup();
    let queries: Vec<(usize, &crate::geom::Point)> =
        inner.iter().flat_map(|&k| surface.section(k).iter().map(move |p| (k, p))).collect();
    let worst = queries
        .par_iter()
        .map(|&(k, q)| Ok((hull_distance(&hull, q)?, k)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, k1), |a, b| if b.0 > a.0 { b } else { a });
    let scale = [k1, k2].iter().map(|&k| surface.profile.r[k]).fold(1.0, f64::max);
    Ok(CheckReport::decided(MAX_PRINCIPLE, STATEMENT, worst.0 / scale, tol)
        .with("tau_1", surface.profile.tau[k1])
        .with("tau_2", surface.profile.tau[k2])
        .with("inner_sections", inner.len())
        .with("points_tested", queries.len())
        .with("max_hull_distance", worst.0)
        .with("worst_tau", surface.profile.tau[worst.1])
        .with("scale", scale))
}
