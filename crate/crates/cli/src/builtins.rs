//! Named surfaces for `verify --builtin`.

use pminimal::profile::{sample_model_surface, solve_profile, ModelSurface, Profile};

use crate::config::SuiteConfig;
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Builtin {
    /// The equality tube of the configured `n` and `p`.
    Tube,
    /// `R = cosh(tau)` in `R^3`; minimal, so p-minimal for `p = 2` only.
    Catenoid,
    /// `R = 1`; convex but not p-minimal.
    Cylinder,
    /// `R = 1.5 - tau^2 / 2` on `|tau| <= 1`; violates every convexity check.
    ConcaveRadius,
    /// `R = sqrt(1 - tau^2)` on `|tau| <= 1/2`; a sphere zone whose waist is
    /// at the middle, so the end sections do not bound the inner ones.
    SphereBarrel,
}

impl Builtin {
    /// The sampled surface and the `n` it lives in. The catenoid ignores the
    /// configured `n`.
    pub fn surface(self, config: &SuiteConfig) -> Result<ModelSurface, Failure> {
        let grid = |span: f64| Profile::symmetric_grid(span, config.h);
        let n = config.n;
        let profile = match self {
            Builtin::Tube => solve_profile(&config.shape()?, config.r, config.tau_span, config.h)?,
            Builtin::Catenoid => Profile::from_radius(2, grid(config.tau_span)?, |t| (t.cosh(), t.sinh(), t.cosh()))?,
            Builtin::Cylinder => Profile::from_radius(n, grid(config.tau_span)?, |_| (1.0, 0.0, 0.0))?,
            Builtin::ConcaveRadius => {
                Profile::from_radius(n, grid(config.tau_span.min(1.0))?, |t| (1.5 - 0.5 * t * t, -t, -1.0))?
            }
            Builtin::SphereBarrel => Profile::from_radius(n, grid(config.tau_span.min(0.5))?, |t| {
                let s = 1.0 - t * t;
                (s.sqrt(), -t / s.sqrt(), -s.powf(-1.5))
            })?,
        };
        Ok(sample_model_surface(&profile, config.theta_count)?)
    }
}
