//! Sections of sampled tubes, their radius and center series, and the
//! checks run on them.

mod checks;
mod local;
mod section;
mod series;
mod suite;

pub use checks::{
    check_delta_convexity, check_family_convexity, check_lifetime_bound, check_max_principle,
    check_r_convexity, check_rho_inequality, check_tube_inequality, ALL_CHECKS, CURVATURE_IDENTITY,
    DELTA_CONVEXITY, FAMILY_CONVEXITY, GAUSS_MAP, LIFETIME_BOUND, MAX_PRINCIPLE, RHO_INEQUALITY,
    R_CONVEXITY, TUBE_INEQUALITY,
};
pub use local::{check_curvature_identity, check_gauss_map};
pub use section::{extract_sections, model_sections, Section, SurfaceSource, MIN_SECTION_POINTS};
pub use series::{build_series, SeriesBundle};
pub use suite::{all_passed, default_tolerance, run_suite, SuiteOptions};
