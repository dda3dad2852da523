//! Convex geometry in low dimensions: enclosing balls, support functions,
//! hull membership, the contact-spread functional, and touching balls.

mod ball;
pub mod directions;
mod convex;
mod hull;
mod point;
mod sigma;
mod touch;

pub use ball::{min_enclosing_ball, Ball, BRUTE_FORCE_LIMIT, CONTAIN_TOL};
pub use convex::{family_convexity_violation, support_value};
pub use hull::{hull_contains, hull_distance, nearest_in_hull};
pub use point::{Point, PointCloud};
pub use sigma::{contact_set, sigma, DEFAULT_CONTACT_TOL, SIGMA_GRID};
pub use touch::{lemma2_touch_ball, touching_ball, TouchingBall, SEPARATION_TOL};

#[allow(unused_imports)]
pub(crate) use convex::support_unchecked;
