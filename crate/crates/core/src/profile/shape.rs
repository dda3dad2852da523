use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;

/// Quadrature tolerance for the improper integrals below.
const QUAD_TOL: f64 = 1e-12;

/// An exponent `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return domain(format!("p must exceed 1, got {p}"));
        }
        Ok(PExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        PExponent::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

/// Dimension, exponent and the tube exponent `beta = (n-1)/(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeShape {
    pub n: usize,
    pub p: PExponent,
    pub beta: f64,
}

impl TubeShape {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        let b = beta(n, p)?;
        Ok(TubeShape { n, p: PExponent::new(p)?, beta: b })
    }

    /// The shape with a prescribed `beta`; `p = 1 + (n-1)/beta` keeps the
    /// defining relation intact.
    pub fn from_beta(n: usize, beta: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("n must be at least 2, got {n}"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("beta must be positive, got {beta}"));
        }
        let p = PExponent::new(1.0 + (n as f64 - 1.0) / beta)?;
        Ok(TubeShape { n, p, beta })
    }
}

/// `(n-1)/(p-1)`.
pub fn beta(n: usize, p: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("n must be at least 2, got {n}"));
    }
    let p = PExponent::new(p)?.value();
    Ok((n as f64 - 1.0) / (p - 1.0))
}

/// `c_beta = ∫_0^∞ dt / sqrt(1 + t^(2 beta))`, finite iff `beta > 1`.
pub fn c_beta(beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::Divergence(format!("c_beta diverges for beta = {beta} <= 1")));
    }
    let head = integrate(|t| 1.0 / (1.0 + t.powf(2.0 * beta)).sqrt(), 0.0, 1.0, QUAD_TOL / 2.0)?;
    // Tail: t = 1/s, then s = u^m with m = 1/(beta-1) removes the
    // s^(beta-2) endpoint singularity.
    let m = 1.0 / (beta - 1.0);
    let tail = integrate(|u| m / (1.0 + u.powf(2.0 * beta * m)).sqrt(), 0.0, 1.0, QUAD_TOL / 2.0)?;
    Ok(head + tail)
}

/// Length of the interval of existence of the profile with waist radius `r`:
/// `2 r ∫_1^∞ ds / sqrt(s^(2 beta) - 1)`. Infinite for `beta <= 1`.
pub fn life_time(shape: &TubeShape, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("waist radius must be positive, got {r}"));
    }
    let beta = shape.beta;
    if beta <= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * r * unit_half_life(beta)?)
}

/// `∫_0^1 x^(beta-2) / sqrt(1 - x^(2 beta)) dx` after `s = 1/x`.
fn unit_half_life(beta: f64) -> Result<f64> {
    let m = 1.0 / (beta - 1.0);
    // Near 0: x = v^m turns x^(beta-2) dx into m dv.
    let split: f64 = 0.5;
    let v_end = split.powf(1.0 / m);
    let head = integrate(
        |v| m / (1.0 - v.powf(2.0 * beta * m)).sqrt(),
        0.0,
        v_end,
        QUAD_TOL / 2.0,
    )?;
    // Near 1: x = 1 - u^2 absorbs the inverse square root.
    let u_end = (1.0 - split).sqrt();
    let tail = integrate(
        |u| {
            let x = 1.0 - u * u;
            let gap = -(2.0 * beta * (-u * u).ln_1p()).exp_m1();
            2.0 * u * x.powf(beta - 2.0) / gap.sqrt()
        },
        0.0,
        u_end,
        QUAD_TOL / 2.0,
    )?;
    Ok(head + tail)
}
