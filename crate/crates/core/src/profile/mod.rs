//! Rotational p-minimal tubes: the exponent `beta`, the constant `c_beta`,
//! the equality profile and the sampled model hypersurface.

mod model;
mod ode;
mod series;
mod shape;

pub use model::{k_e_model, sample_model_surface, ModelSurface, MIN_THETA_COUNT};
pub use ode::{first_integral_residuals, solve_profile, BLOW_UP_FACTOR};
pub use series::{Profile, ProfileStatus};
pub use shape::{beta, c_beta, life_time, PExponent, TubeShape};
