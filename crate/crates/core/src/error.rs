use std::path::PathBuf;

/// Errors raised by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated the operation's domain (bad exponent, empty cloud, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An improper integral or quantity diverges.
    #[error("divergence: {0}")]
    Divergence(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    /// The metric at a node is numerically singular.
    #[error("degenerate metric at node {node:?} (condition number {condition:e})")]
    DegenerateMetric { node: Vec<usize>, condition: f64 },

    /// `e` is normal to the surface, so `e^T` vanishes.
    #[error("critical point: |e^T| = {0:e}")]
    CriticalPoint(f64),

    /// Damped Newton failed to reach the residual tolerance.
    #[error("Newton solver stalled at p = {p} after {iterations} iterations (residual {residual:e})")]
    Convergence { residual: f64, iterations: usize, p: f64 },

    /// A sampled surface is not a tube over the requested heights.
    #[error("tube violation: {0}")]
    TubeViolation(String),

    /// A check was requested on an input that does not satisfy its hypothesis.
    #[error("precondition failed: {message} (max residual {max_residual:e})")]
    Precondition { message: String, max_residual: f64, worst_node: Vec<usize> },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
