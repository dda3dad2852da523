//! The rotational equality profile `R R'' = beta (1 + R'^2)`, `R(0) = r`, `R'(0) = 0`.
//!
//! The second-order equation is integrated directly with classical RK4. Each
//! grid step `h` is covered by adaptive substeps controlled by step doubling,
//! so accuracy holds up close to the blow-up of `R`. The first integral
//! `1 + R'^2 = (R/r)^(2 beta)` is never used by the integrator and stays
//! available as an independent check.

use super::series::{Profile, ProfileStatus};
use super::shape::TubeShape;
use crate::error::{domain, Result};
use crate::geom::Point;

/// Integration stops once `R` exceeds this multiple of the waist radius.
pub const BLOW_UP_FACTOR: f64 = 1e6;

const RTOL: f64 = 1e-13;
const MIN_SUBSTEP_FRACTION: f64 = 1e-12;

type State = [f64; 2];

fn rhs(beta: f64, y: State) -> State {
    [y[1], beta * (1.0 + y[1] * y[1]) / y[0]]
}

fn rk4(beta: f64, y: State, dt: f64) -> State {
    let step = |y: State, k: State, s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = rhs(beta, y);
    let k2 = rhs(beta, step(y, k1, dt / 2.0));
    let k3 = rhs(beta, step(y, k2, dt / 2.0));
    let k4 = rhs(beta, step(y, k3, dt));
    [
        y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Advances `y` by exactly `h`, or returns `None` if the substep underflows
/// or the radius leaves the admissible range.
fn advance(beta: f64, mut y: State, h: f64, r0: f64, dt_hint: &mut f64) -> Option<State> {
    let mut left = h;
    let mut dt = dt_hint.min(h);
    while left > 0.0 {
        dt = dt.min(left);
        if dt < MIN_SUBSTEP_FRACTION * h {
            return None;
        }
        let full = rk4(beta, y, dt);
        let half = rk4(beta, rk4(beta, y, dt / 2.0), dt / 2.0);
        let err = (0..2)
            .map(|i| (half[i] - full[i]).abs() / (RTOL * (half[i].abs() + r0)))
            .fold(0.0_f64, f64::max);
        if !err.is_finite() || half[0] <= 0.0 {
            dt /= 4.0;
            continue;
        }
        if err <= 1.0 {
            y = half;
            left -= dt;
            if left < 1e-15 * h {
                left = 0.0;
            }
            if y[0] > BLOW_UP_FACTOR * r0 {
                return None;
            }
        }
        let grow = if err == 0.0 { 2.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 2.0) };
        dt *= grow;
    }
    *dt_hint = dt;
    Some(y)
}

/// Samples the equality profile with waist radius `r` on `tau_k = k h`,
/// `|tau_k| <= tau_span`, clipped to the interval of existence.
///
/// `R''` is stored from the right-hand side, not differenced. The center is
/// `xi ≡ 0` in `R^n`.
pub fn solve_profile(shape: &TubeShape, r: f64, tau_span: f64, h: f64) -> Result<Profile> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("waist radius must be positive, got {r}"));
    }
    if !(h > 0.0) || !(tau_span > 0.0) || !h.is_finite() || !tau_span.is_finite() {
        return domain("tau span and step must be positive and finite");
    }
    let beta = shape.beta;
    let steps = (tau_span / h + 1e-9).floor() as usize;
    if steps == 0 {
        return domain("tau span is shorter than one step");
    }

    let mut half_r = vec![r];
    let mut half_dr = vec![0.0];
    let mut y: State = [r, 0.0];
    let mut dt_hint = h;
    let mut status = ProfileStatus::Complete;
    for k in 0..steps {
        match advance(beta, y, h, r, &mut dt_hint) {
            Some(next) => {
                y = next;
                half_r.push(y[0]);
                half_dr.push(y[1]);
            }
            None => {
                status = ProfileStatus::Truncated { blow_up_at: (k + 1) as f64 * h };
                break;
            }
        }
    }
    if half_r.len() < 2 {
        return domain("profile blows up within the first step; reduce h");
    }

    // R is even, R' odd.
    let m = half_r.len() - 1;
    let mut tau = Vec::with_capacity(2 * m + 1);
    let mut rr = Vec::with_capacity(2 * m + 1);
    let mut dr = Vec::with_capacity(2 * m + 1);
    for k in (1..=m).rev() {
        tau.push(-(k as f64) * h);
        rr.push(half_r[k]);
        dr.push(-half_dr[k]);
    }
    for k in 0..=m {
        tau.push(k as f64 * h);
        rr.push(half_r[k]);
        dr.push(half_dr[k]);
    }
    let ddr: Vec<f64> = rr.iter().zip(&dr).map(|(&a, &b)| beta * (1.0 + b * b) / a).collect();
    let zero = vec![Point::zeros(shape.n); tau.len()];
    Profile::new(tau, rr, dr, ddr, zero.clone(), zero.clone(), zero, status)
}

/// `|1 + R'^2 - (R/r)^(2 beta)| / (R/r)^(2 beta)` at every node, with `r` the
/// radius at the waist node.
pub fn first_integral_residuals(profile: &Profile, beta: f64) -> Vec<f64> {
    let r0 = profile.min_radius();
    profile
        .r
        .iter()
        .zip(&profile.dr)
        .map(|(&r, &d)| {
            let rhs = (r / r0).powf(2.0 * beta);
            (1.0 + d * d - rhs).abs() / rhs
        })
        .collect()
}
