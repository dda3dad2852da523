use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::checks::*;
use super::local::{check_curvature_identity, check_gauss_map, require_profile};
use super::section::model_sections;
use super::series::build_series;
use crate::error::{domain, Error, Result};
use crate::gauss_map::GaussMapOptions;
use crate::profile::{ModelSurface, PExponent, TubeShape};
use crate::report::{CheckReport, Status};

/// Default tolerance of each check. For the Gauss-map check the number is
/// the slack constant multiplying the measured discretisation error.
pub fn default_tolerance(check: &str) -> Option<f64> {
    Some(match check {
        CURVATURE_IDENTITY => 1e-4,
        GAUSS_MAP => GaussMapOptions::default().slack_constant,
        R_CONVEXITY | FAMILY_CONVEXITY | DELTA_CONVEXITY => 1e-6,
        TUBE_INEQUALITY | RHO_INEQUALITY => 1e-4,
        LIFETIME_BOUND | MAX_PRINCIPLE => 1e-9,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    /// Checks to run, in any order; empty runs all of them.
    pub checks: Vec<String>,
    /// Overrides of [`default_tolerance`].
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// Random triples for the family-convexity check.
    pub trials: usize,
    /// Use every `section_stride`-th profile node as a section.
    pub section_stride: usize,
    /// Largest estimated truncation error of `R''` at a node that enters the
    /// differential checks.
    pub resolution: f64,
    /// Sections tested between the two ends of the max-principle check.
    pub inner_samples: usize,
    /// Positions of the max-principle ends as fractions of the grid.
    pub max_principle_ends: (f64, f64),
    /// Evaluate the curvature identity at every `curvature_stride`-th node.
    pub curvature_stride: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
            seed: 0,
            trials: 2000,
            section_stride: 1,
            resolution: 1e-5,
            inner_samples: 64,
            max_principle_ends: (0.25, 0.75),
            curvature_stride: 1,
        }
    }
}

impl SuiteOptions {
    /// Rejects unknown check names and non-positive tolerances; returns the
    /// checks to run in report order.
    pub fn selected(&self) -> Result<Vec<&'static str>> {
        for name in self.checks.iter().chain(self.tolerances.keys()) {
            if !ALL_CHECKS.contains(&name.as_str()) {
                return domain(format!("unknown check '{name}'; known checks: {}", ALL_CHECKS.join(", ")));
            }
        }
        if let Some((name, tol)) = self.tolerances.iter().find(|(_, &t)| !(t > 0.0) || !t.is_finite()) {
            return domain(format!("tolerance for {name} must be positive, got {tol}"));
        }
        let (a, b) = self.max_principle_ends;
        if !(0.0 <= a && a < b && b <= 1.0) {
            return domain(format!("max-principle ends must satisfy 0 <= a < b <= 1, got ({a}, {b})"));
        }
        if !(self.resolution > 0.0) {
            return domain("resolution must be positive");
        }
        Ok(ALL_CHECKS
            .iter()
            .copied()
            .filter(|c| self.checks.is_empty() || self.checks.iter().any(|s| s == c))
            .collect())
    }

    pub fn tolerance(&self, check: &str) -> f64 {
        self.tolerances.get(check).copied().or_else(|| default_tolerance(check)).unwrap_or(0.0)
    }
}

/// Runs the selected checks on a sampled tube, treating it as p-minimal for
/// the given exponent. Failures of individual checks are reports, not
/// errors; only invalid options and malformed input are errors.
pub fn run_suite(surface: &ModelSurface, p: PExponent, options: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let selected = options.selected()?;
    let profile = &surface.profile;
    require_profile(profile)?;
    let shape = TubeShape::new(profile.n(), p.value())?;
    let needs_sections = selected.iter().any(|c| ![CURVATURE_IDENTITY, GAUSS_MAP].contains(c));
    let sections = if needs_sections { model_sections(surface, options.section_stride)? } else { Vec::new() };
    let bundle = if needs_sections { Some(build_series(&sections)?) } else { None };
    let bundle = || bundle.as_ref().expect("sections were built");

    let mut reports = Vec::new();
    for &check in &selected {
        let tol = options.tolerance(check);
        let result = match check {
            CURVATURE_IDENTITY => {
                check_curvature_identity(profile, p, tol, options.resolution, options.curvature_stride)
            }
            GAUSS_MAP => {
                let opts = GaussMapOptions { slack_constant: tol, ..GaussMapOptions::default() };
                check_gauss_map(profile, p, options.resolution, &opts)
            }
            R_CONVEXITY => check_r_convexity(bundle(), tol),
            FAMILY_CONVEXITY => check_family_convexity(&sections, options.trials, options.seed, tol),
            DELTA_CONVEXITY => check_delta_convexity(bundle(), tol),
            TUBE_INEQUALITY => check_tube_inequality(bundle(), shape.beta, tol, options.resolution),
            LIFETIME_BOUND => check_lifetime_bound(bundle(), shape.beta, tol),
            RHO_INEQUALITY => check_rho_inequality(bundle(), p.value(), tol, options.resolution),
            MAX_PRINCIPLE => {
                let last = (profile.len() - 1) as f64;
                let (a, b) = options.max_principle_ends;
                let k1 = (a * last).round() as usize;
                let k2 = (b * last).round() as usize;
                check_max_principle(surface, k1, k2, options.inner_samples, tol)
            }
            _ => unreachable!("selected() only yields known checks"),
        };
        reports.push(match result {
            Ok(r) => r,
            // A check whose own input requirements fail is reported, not fatal.
            Err(e @ (Error::Domain(_) | Error::DegenerateMetric { .. } | Error::CriticalPoint(_))) => {
                let mut r = CheckReport::decided(check, "", f64::INFINITY, tol);
                r.status = Status::Fail;
                r.with("error", e.to_string())
            }
            Err(e) => return Err(e),
        });
    }
    Ok(reports)
}

/// Whether every check that ran passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}
