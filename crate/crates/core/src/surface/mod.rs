//! Finite-difference geometry of sampled hypersurfaces and graphs.

mod banded;
mod curvature;
mod graph;
mod hessian;
mod patch;
mod solver;

pub use curvature::{
    curvature_at, directional_curvature, laplace_beltrami_height, laplace_identity_residual,
    mean_curvature_defect, p_laplace_residual, p_laplace_two_term, CurvatureData, CRITICAL_TOL,
    MAX_METRIC_CONDITION,
};
pub use graph::{nonparametric_operator, nonparametric_residual, GraphFunction, GraphJet};
pub use hessian::{forced_exponent, hessian_criterion, HessianVerdict};
pub use patch::{Orientation, Patch};
pub use solver::{
    max_residual, refine_p_minimal_graph, solve_p_minimal_graph, GraphSolution, GridSpec, SolverOptions,
    MAX_GRID,
};
