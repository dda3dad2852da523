mod common;

use pminimal::geom::Point;
use pminimal::profile::{sample_model_surface, solve_profile, ModelSurface, PExponent, Profile, TubeShape};
use pminimal::report::{CheckReport, Status};
use pminimal::tube::*;

fn generated(n: usize, beta: f64, h: f64) -> (ModelSurface, PExponent) {
    let shape = TubeShape::from_beta(n, beta).unwrap();
    let prof = solve_profile(&shape, 1.0, 10.0, h).unwrap();
    (sample_model_surface(&prof, 64).unwrap(), shape.p)
}

fn status_of<'a>(reports: &'a [CheckReport], name: &str) -> &'a CheckReport {
    reports.iter().find(|r| r.name == name).unwrap()
}

#[test]
fn generated_tubes_pass_every_check() {
    for beta in [1.5, 2.0, 3.0] {
        let (m, p) = generated(2, beta, 1e-3);
        let reports = run_suite(&m, p, &SuiteOptions::default()).unwrap();
        assert_eq!(reports.len(), ALL_CHECKS.len());
        for r in &reports {
            assert_ne!(r.status, Status::Fail, "beta {beta}: {r:?}");
        }
        assert!(status_of(&reports, GAUSS_MAP).passed());
        assert!(status_of(&reports, LIFETIME_BOUND).passed());
    }
}

#[test]
fn three_dimensional_minimal_tube() {
    let (m, p) = generated(3, 2.0, 2e-3);
    let reports = run_suite(&m, p, &SuiteOptions::default()).unwrap();
    assert!(all_passed(&reports), "{reports:#?}");
    let rho = status_of(&reports, RHO_INEQUALITY);
    assert!(rho.passed());
    assert!(rho.details["max_residual_difference"].as_f64().unwrap() < 1e-8);
}

fn barrel(n: usize) -> ModelSurface {
    let prof = Profile::from_radius(n, Profile::symmetric_grid(0.5, 1e-3).unwrap(), |t| {
        let s = 1.0 - t * t;
        (s.sqrt(), -t / s.sqrt(), -s.powf(-1.5))
    })
    .unwrap();
    sample_model_surface(&prof, 64).unwrap()
}

fn concave(n: usize) -> ModelSurface {
    let prof =
        Profile::from_radius(n, Profile::symmetric_grid(1.0, 1e-3).unwrap(), |t| (1.5 - 0.5 * t * t, -t, -1.0))
            .unwrap();
    sample_model_surface(&prof, 64).unwrap()
}

#[test]
fn counterexamples_fail_where_expected() {
    let p = PExponent::new(2.0).unwrap();
    for n in [2, 3] {
        let opts = SuiteOptions { trials: 500, ..Default::default() };
        let r = run_suite(&barrel(n), p, &opts).unwrap();
        assert!(status_of(&r, MAX_PRINCIPLE).failed());
        let r = run_suite(&concave(n), p, &opts).unwrap();
        assert!(status_of(&r, R_CONVEXITY).failed());
        assert!(status_of(&r, FAMILY_CONVEXITY).failed());
        assert!((status_of(&r, R_CONVEXITY).max_violation - 1.0 / 1.5).abs() < 1e-6);
    }
}

#[test]
fn equality_gap_shrinks_quadratically() {
    let gap = |h: f64| {
        let (m, p) = generated(2, 2.0, h);
        let shape = TubeShape::new(2, p.value()).unwrap();
        // Compare on a fixed window so both grids see the same nodes.
        let secs = model_sections(&m, 1).unwrap();
        let inside: Vec<Section> = secs.into_iter().filter(|s| s.tau.abs() <= 0.5 + 1e-9).collect();
        let b = build_series(&inside).unwrap();
        check_tube_inequality(&b, shape.beta, 1e-4, 1.0).unwrap().details["max_equality_gap"].as_f64().unwrap()
    };
    let (coarse, fine) = (gap(4e-3), gap(2e-3));
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "{coarse} / {fine} = {ratio}");
}

#[test]
fn series_match_brute_force_balls() {
    let prof = Profile::from_radius(2, Profile::symmetric_grid(0.5, 0.05).unwrap(), |t| (t.cosh(), t.sinh(), t.cosh()))
        .unwrap()
        .with_center(|t| (Point::from([0.3 * t, -0.2 * t * t]), Point::from([0.3, -0.4 * t]), Point::from([0.0, -0.4])))
        .unwrap();
    let m = sample_model_surface(&prof, 9).unwrap();
    let b = build_series(&model_sections(&m, 1).unwrap()).unwrap();
    for k in 0..prof.len() {
        let pts: Vec<Vec<f64>> = m.section(k).iter().map(|p| p.projected().into_coords()).collect();
        let (c, r) = common::brute_force_ball(&pts);
        assert!((b.r[k] - r).abs() < 1e-9, "{k}");
        assert!(b.xi[k].distance(&Point::new(c)) < 1e-7);
        let rho = pts.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        assert!((b.rho[k] - rho).abs() < 1e-12);
    }
}

#[test]
fn off_axis_catenoid_patch() {
    use pminimal::surface::{Orientation, Patch};
    use std::f64::consts::PI;
    let c = [1.0, 0.5];
    let patch = Patch::from_fn(
        vec![128, 41],
        vec![0.0, -1.0],
        vec![2.0 * PI / 128.0, 0.05],
        vec![true, false],
        Orientation::AwayFromLine { origin: Point::from([c[0], c[1], 0.0]), direction: Point::basis(3, 2) },
        |u| {
            let r = u[1].cosh();
            Point::from([c[0] + r * u[0].cos(), c[1] + r * u[0].sin(), u[1]])
        },
    )
    .unwrap();
    let taus: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.1).collect();
    let secs = extract_sections(SurfaceSource::Patch(&patch), &taus).unwrap();
    let b = build_series(&secs).unwrap();
    let norm_c = c[0].hypot(c[1]);
    for (k, &t) in taus.iter().enumerate() {
        assert!((b.r[k] - t.cosh()).abs() < 2e-3);
        assert!((b.rho[k] - (norm_c + t.cosh())).abs() < 2e-3);
    }
    let report = check_rho_inequality(&b, 2.0, 1e-4, 1.0).unwrap();
    assert!(report.details.contains_key("max_residual_difference"));
}
