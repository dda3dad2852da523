use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pminimal::profile::{PExponent, TubeShape};
use pminimal::surface::SolverOptions;
use pminimal::tube::SuiteOptions;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Every knob of every subcommand. Read from a JSON file, then overridden by
/// flags; unset fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: usize,
    /// Defaults to 2, or to the exponent recorded next to a verified tube.
    pub p: Option<f64>,
    /// When set, `p = 1 + (n - 1) / beta`.
    pub beta: Option<f64>,
    /// Waist radius of generated tubes.
    pub r: f64,
    pub tau_span: f64,
    pub h: f64,
    pub theta_count: usize,
    /// Nodes per side of the graph grid.
    pub grid: usize,
    /// Grid doublings after the first solve.
    pub refine: usize,
    pub boundary: Boundary,
    pub solver: SolverOptions,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<String>,
    pub seed: u64,
    pub trials: usize,
    pub section_stride: usize,
    pub resolution: f64,
    pub inner_samples: usize,
    pub out: PathBuf,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let suite = SuiteOptions::default();
        SuiteConfig {
            n: 2,
            p: None,
            beta: None,
            r: 1.0,
            tau_span: 3.0,
            h: 1e-3,
            theta_count: 64,
            grid: 65,
            refine: 0,
            boundary: Boundary::Sinusoid,
            solver: SolverOptions::default(),
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            seed: suite.seed,
            trials: suite.trials,
            section_stride: suite.section_stride,
            resolution: suite.resolution,
            inner_samples: suite.inner_samples,
            out: PathBuf::from("out"),
        }
    }
}

/// Named boundary data for the graph solver, each with its own domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `0.3 + x - 0.5 y` on the unit square; p-harmonic for every p.
    Affine,
    /// `acosh(sqrt(x^2 + y^2))` on `[1.5, 2.5] x [-0.5, 0.5]`, the upper
    /// catenoid sheet; minimal for p = 2.
    Catenoid,
    /// `x + 0.5 y + 0.2 sin(pi x) cos(pi y)` on the unit square.
    Sinusoid,
}

impl Boundary {
    pub fn domain(self) -> [f64; 4] {
        match self {
            Boundary::Affine | Boundary::Sinusoid => [0.0, 1.0, 0.0, 1.0],
            Boundary::Catenoid => [1.5, 2.5, -0.5, 0.5],
        }
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Boundary::Affine => 0.3 + x - 0.5 * y,
            Boundary::Catenoid => x.hypot(y).acosh(),
            Boundary::Sinusoid => x + 0.5 * y + 0.2 * (PI * x).sin() * (PI * y).cos(),
        }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    /// The exponent: `beta` wins over `p`, then `fallback`, then 2.
    pub fn exponent(&self, fallback: Option<f64>) -> Result<PExponent, Failure> {
        let p = match (self.beta, self.p) {
            (Some(b), _) => {
                if !(b > 0.0) {
                    return Err(Failure::Usage(format!("beta must be positive, got {b}")));
                }
                1.0 + (self.n as f64 - 1.0) / b
            }
            (None, Some(p)) => p,
            (None, None) => fallback.unwrap_or(2.0),
        };
        Ok(PExponent::new(p)?)
    }

    pub fn shape(&self) -> Result<TubeShape, Failure> {
        Ok(TubeShape::new(self.n, self.exponent(None)?.value())?)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Usage(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.h > 0.0) || !(self.r > 0.0) || !(self.tau_span > 0.0) {
            return bad("h, r and tau-span must be positive".into());
        }
        if let Some((name, t)) = self.tolerances.iter().find(|(_, t)| !(**t > 0.0)) {
            return bad(format!("tolerance for {name} must be positive, got {t}"));
        }
        if let Some(p) = self.p {
            PExponent::new(p)?;
        }
        Ok(())
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            checks: self.checks.clone(),
            tolerances: self.tolerances.clone(),
            seed: self.seed,
            trials: self.trials,
            section_stride: self.section_stride,
            resolution: self.resolution,
            inner_samples: self.inner_samples,
            ..SuiteOptions::default()
        }
    }
}

/// Rewrites `--tol.NAME=V` and `--tol.NAME V` into `--tol NAME=V`, which
/// clap can parse.
pub fn rewrite_tolerance_flags(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut args = args.into_iter();
    while let Some(a) = args.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) => {
                out.push("--tol".to_string());
                if rest.contains('=') {
                    out.push(rest.to_string());
                } else {
                    let value = args.next().unwrap_or_default();
                    out.push(format!("{rest}={value}"));
                }
            }
            None => out.push(a),
        }
    }
    out
}

pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = value.parse().map_err(|_| format!("tolerance for {name} is not a number: '{value}'"))?;
    Ok((name.to_string(), v))
}
