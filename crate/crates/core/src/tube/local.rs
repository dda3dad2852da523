//! Checks that need the parametrised tube near a grid node rather than its
//! sections: the curvature identity and the Gauss-map distortion.

use rayon::prelude::*;

use super::checks::{CURVATURE_IDENTITY, GAUSS_MAP};
use super::series::{differences, truncation_estimate};
use crate::error::{domain, Error, Result};
use crate::gauss_map::{verify_theorem1, GaussMapOptions, GAUSS_MAP_STATEMENT};
use crate::geom::{directions::hyperspherical, Point};
use crate::profile::{PExponent, Profile};
use crate::report::CheckReport;
use crate::surface::{
    curvature_at, laplace_beltrami_height, mean_curvature_defect, p_laplace_residual, p_laplace_two_term,
    Orientation, Patch,
};

/// Stencil half-width of the local patches; the Laplacian in divergence form
/// needs two.
const HALF: usize = 2;

/// Fixed angles of the local patch center, away from the coordinate poles.
fn base_angles(n: usize) -> Vec<f64> {
    (0..n - 1).map(|i| if i + 2 == n { 0.7 } else { 1.1 }).collect()
}

/// `(2 HALF + 1)^n` samples of the tube around profile node `k`, with step
/// `stride h` in `tau` and in every angle.
fn local_patch(profile: &Profile, k: usize, stride: usize) -> Result<Patch> {
    let n = profile.n();
    let h = profile.h() * stride as f64;
    let angles = base_angles(n);
    let side = 2 * HALF + 1;
    let mut origin = vec![profile.tau[k] - HALF as f64 * h];
    origin.extend(angles.iter().map(|a| a - HALF as f64 * h));
    let axis = Point::basis(n + 1, n);
    let center = profile.xi[k].lifted(0.0);
    Patch::from_fn(
        vec![side; n],
        origin,
        vec![h; n],
        vec![false; n],
        Orientation::AwayFromLine { origin: center, direction: axis },
        |u| {
            // Node along tau recovered from the parameter; exact on the grid.
            let i = ((u[0] - profile.tau[k]) / h).round() as isize;
            let j = (k as isize + i * stride as isize) as usize;
            let theta = hyperspherical(&u[1..]);
            profile.xi[j].axpy(profile.r[j], &theta).lifted(profile.tau[j])
        },
    )
}

struct NodeDefects {
    k: usize,
    defect: f64,
    coarse_defect: f64,
    laplace: f64,
    two_term: f64,
}

fn node_defects(profile: &Profile, k: usize, p: PExponent, e: &Point) -> Result<NodeDefects> {
    let center = vec![HALF; profile.n()];
    let fine = local_patch(profile, k, 1)?;
    let data = curvature_at(&fine, &center, e)?;
    let scale = data.shape_norm().max(1.0);
    let defect = mean_curvature_defect(&data, p)?.abs() / scale;
    let lap = laplace_beltrami_height(&fine, &center, e)?;
    let laplace = (lap - data.mean * data.omega).abs() / scale;
    let two_term = (p_laplace_two_term(&data, p, lap)? - p_laplace_residual(&data, p)?).abs() / scale;
    let coarse = local_patch(profile, k, 2)?;
    let cdata = curvature_at(&coarse, &center, e)?;
    let coarse_defect = mean_curvature_defect(&cdata, p)?.abs() / cdata.shape_norm().max(1.0);
    Ok(NodeDefects { k, defect, coarse_defect, laplace, two_term })
}

/// Nodes whose `R''` is resolved by central differences to `resolution`,
/// with room for a stencil of half-width `margin`.
pub(crate) fn resolved_nodes(profile: &Profile, beta: f64, resolution: f64, margin: usize) -> Vec<usize> {
    let h = profile.h();
    (margin.max(2)..profile.len().saturating_sub(margin.max(2)))
        .filter(|&k| {
            let d = differences(&profile.r, h, k);
            let r = profile.r[k];
            let scale = (r * d.d2).abs().max(beta * (1.0 + d.d1 * d.d1)).max(1.0);
            truncation_estimate(&d, r, h, beta, scale) <= resolution
        })
        .collect()
}

/// `|H + (p - 2) k_e| <= tol`, relative to `max(1, |A|)`, at resolved nodes
/// (every `stride`-th), on local patches of step `h`.
///
/// The same defect on patches of step `2h` gives the observed order
/// `log2(max defect at 2h / max defect at h)`. The two identities used on the
/// way, `Δf = H <e, nu>` and the two forms of `Δ_p f`, are reported too.
pub fn check_curvature_identity(
    profile: &Profile,
    p: PExponent,
    tol: f64,
    resolution: f64,
    stride: usize,
) -> Result<CheckReport> {
    const STATEMENT: &str = "H + (p - 2) k_e = 0";
    let n = profile.n();
    let beta = (n - 1) as f64 / (p.value() - 1.0);
    let nodes: Vec<usize> = resolved_nodes(profile, beta, resolution, 2 * HALF)
        .into_iter()
        .step_by(stride.max(1))
        .collect();
    if nodes.is_empty() {
        return Ok(CheckReport::decided(CURVATURE_IDENTITY, STATEMENT, f64::INFINITY, tol)
            .with("nodes", 0)
            .with("reason", "no node is resolved by the grid"));
    }
    let e = Point::basis(n + 1, n);
    let all: Vec<NodeDefects> = nodes.par_iter().map(|&k| node_defects(profile, k, p, &e)).collect::<Result<_>>()?;
    let worst = all.iter().fold(&all[0], |a, b| if b.defect > a.defect { b } else { a });
    let coarse = all.iter().map(|d| d.coarse_defect).fold(0.0, f64::max);
    let order = (coarse / worst.defect).log2();
    let laplace = all.iter().map(|d| d.laplace).fold(0.0, f64::max);
    let two_term = all.iter().map(|d| d.two_term).fold(0.0, f64::max);
    let taus = (profile.tau[nodes[0]], profile.tau[nodes[nodes.len() - 1]]);
    Ok(CheckReport::decided(CURVATURE_IDENTITY, STATEMENT, worst.defect, tol)
        .with("p", p.value())
        .with("h", profile.h())
        .with("nodes", nodes.len())
        .with("tau_range", serde_json::json!([taus.0, taus.1]))
        .with("worst_tau", profile.tau[worst.k])
        .with("max_defect_2h", coarse)
        .with("refinement_order", crate::report::json_f64(order))
        .with("max_laplace_identity_residual", laplace)
        .with("max_p_laplace_form_difference", two_term))
}

/// Angular resolution of the tube patch handed to the Gauss-map check.
const GAUSS_ANGLES: usize = 256;

/// Rows along `tau` in the Gauss-map patch.
const GAUSS_ROWS: usize = 201;

/// The Gauss-map distortion check on a periodic patch of a two-dimensional
/// tube over its resolved nodes. Skipped for `n != 2` and when the profile
/// is not p-minimal.
pub fn check_gauss_map(profile: &Profile, p: PExponent, resolution: f64, options: &GaussMapOptions) -> Result<CheckReport> {
    if profile.n() != 2 {
        return Ok(CheckReport::skipped(GAUSS_MAP, GAUSS_MAP_STATEMENT, "defined for two-dimensional surfaces"));
    }
    let beta = 1.0 / (p.value() - 1.0);
    let nodes = resolved_nodes(profile, beta, resolution, 1);
    if nodes.len() < 3 {
        return Ok(CheckReport::skipped(GAUSS_MAP, GAUSS_MAP_STATEMENT, "fewer than three resolved nodes"));
    }
    let stride = (nodes.len() / GAUSS_ROWS).max(1);
    // Resolved nodes are contiguous; take an equally spaced run through them.
    let rows: Vec<usize> = (nodes[0]..=nodes[nodes.len() - 1]).step_by(stride).collect();
    if rows.len() < 3 {
        return Ok(CheckReport::skipped(GAUSS_MAP, GAUSS_MAP_STATEMENT, "fewer than three resolved rows"));
    }
    let dphi = std::f64::consts::TAU / GAUSS_ANGLES as f64;
    let h = profile.h() * stride as f64;
    let t0 = profile.tau[rows[0]];
    let patch = Patch::from_fn(
        vec![rows.len(), GAUSS_ANGLES],
        vec![t0, 0.0],
        vec![h, dphi],
        vec![false, true],
        Orientation::AwayFromLine { origin: Point::zeros(3), direction: Point::basis(3, 2) },
        |u| {
            let i = ((u[0] - t0) / h).round() as usize;
            let k = rows[i];
            let theta = Point::from([u[1].cos(), u[1].sin()]);
            profile.xi[k].axpy(profile.r[k], &theta).lifted(profile.tau[k])
        },
    )?;
    match verify_theorem1(&patch, p, &Point::basis(3, 2), options) {
        Ok((report, _)) => Ok(report.with("rows", rows.len()).with("angles", GAUSS_ANGLES)),
        Err(Error::Precondition { message, max_residual, .. }) => {
            Ok(CheckReport::skipped(GAUSS_MAP, GAUSS_MAP_STATEMENT, &message).with("max_normalized_defect", max_residual))
        }
        Err(e) => Err(e),
    }
}

pub(crate) fn require_profile(profile: &Profile) -> Result<()> {
    if profile.len() < 2 * 2 * HALF + 1 {
        return domain("the profile is too short for local patches");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{solve_profile, TubeShape};
    use crate::report::Status;

    #[test]
    fn catenoid_identity_and_order() {
        let prof = Profile::from_radius(2, Profile::symmetric_grid(1.0, 2e-3).unwrap(), |t| {
            (t.cosh(), t.sinh(), t.cosh())
        })
        .unwrap();
        let c = check_curvature_identity(&prof, PExponent::new(2.0).unwrap(), 1e-4, 1e-5, 1).unwrap();
        assert!(c.passed(), "{c:?}");
        let order = c.details["refinement_order"].as_f64().unwrap();
        assert!(order > 1.9, "{order}");
        assert!(c.details["max_laplace_identity_residual"].as_f64().unwrap() < 1e-3);
    }

    #[test]
    fn generated_tubes_in_three_and_four_dimensions() {
        for (n, p) in [(3, 2.0), (4, 3.0)] {
            let shape = TubeShape::new(n, p).unwrap();
            let prof = solve_profile(&shape, 1.0, 0.6, 2e-3).unwrap();
            let c = check_curvature_identity(&prof, shape.p, 1e-4, 1e-5, 1).unwrap();
            assert!(c.passed(), "{n} {p}: {c:?}");
        }
    }

    #[test]
    fn cylinder_is_not_p_minimal() {
        let prof = Profile::from_radius(2, Profile::symmetric_grid(0.5, 1e-2).unwrap(), |_| (1.0, 0.0, 0.0)).unwrap();
        let c = check_curvature_identity(&prof, PExponent::new(2.0).unwrap(), 1e-4, 1e-5, 1).unwrap();
        assert!(c.failed());
    }

    #[test]
    fn gauss_map_on_the_catenoid() {
        let prof = Profile::from_radius(2, Profile::symmetric_grid(1.0, 1e-3).unwrap(), |t| {
            (t.cosh(), t.sinh(), t.cosh())
        })
        .unwrap();
        let c = check_gauss_map(&prof, PExponent::new(2.0).unwrap(), 1e-6, &GaussMapOptions::default()).unwrap();
        assert!(c.passed(), "{c:?}");
        let barrel = Profile::from_radius(2, Profile::symmetric_grid(0.5, 1e-3).unwrap(), |t| {
            let s = 1.0 - t * t;
            (s.sqrt(), -t / s.sqrt(), -s.powf(-1.5))
        })
        .unwrap();
        let c = check_gauss_map(&barrel, PExponent::new(2.0).unwrap(), 1e-6, &GaussMapOptions::default()).unwrap();
        assert_eq!(c.status, Status::Skipped);
    }
}
