use serde::{Deserialize, Serialize};

use super::section::Section;
use crate::error::{domain, Result};
use crate::geom::Point;

/// Radius, center and outer-radius series of a sliced tube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBundle {
    pub tau: Vec<f64>,
    pub r: Vec<f64>,
    pub xi: Vec<Point>,
    /// `rho = max |x|` over the section.
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `min sigma` over all sections.
    pub epsilon: f64,
}

impl SeriesBundle {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Mean grid step.
    pub fn h(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        (self.tau[self.len() - 1] - self.tau[0]) / (self.len() - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.tau[self.len() - 1] - self.tau[0]
    }

    /// Coordinate `k` of the center series.
    pub fn xi_component(&self, k: usize) -> Vec<f64> {
        self.xi.iter().map(|p| p[k]).collect()
    }

    /// Whether the grid is uniform to a relative `1e-9`.
    pub(crate) fn is_uniform(&self) -> bool {
        let h = self.h();
        self.tau.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }
}

pub fn build_series(sections: &[Section]) -> Result<SeriesBundle> {
    if sections.is_empty() {
        return domain("no sections to build a series from");
    }
    if sections.windows(2).any(|w| !(w[1].tau > w[0].tau)) {
        return domain("sections must be ordered by strictly increasing tau");
    }
    let rho = sections
        .iter()
        .map(|s| s.points.iter().map(Point::norm).fold(0.0, f64::max))
        .collect();
    let sigma: Vec<f64> = sections.iter().map(|s| s.sigma).collect();
    Ok(SeriesBundle {
        tau: sections.iter().map(|s| s.tau).collect(),
        r: sections.iter().map(|s| s.ball.radius).collect(),
        xi: sections.iter().map(|s| s.ball.center.clone()).collect(),
        rho,
        epsilon: sigma.iter().cloned().fold(f64::INFINITY, f64::min),
        sigma,
    })
}

/// Central differences of first to fourth order at node `k` of a uniform
/// series. Orders above two need `2 <= k < len - 2`.
pub(crate) struct Differences {
    pub d1: f64,
    pub d2: f64,
    pub d3: Option<f64>,
    pub d4: Option<f64>,
}

pub(crate) fn differences(v: &[f64], h: f64, k: usize) -> Differences {
    let (m, c, p) = (v[k - 1], v[k], v[k + 1]);
    let d1 = (p - m) / (2.0 * h);
    let d2 = (p - 2.0 * c + m) / (h * h);
    let (d3, d4) = if k >= 2 && k + 2 < v.len() {
        let (mm, pp) = (v[k - 2], v[k + 2]);
        (
            Some((pp - 2.0 * p + 2.0 * m - mm) / (2.0 * h * h * h)),
            Some((pp - 4.0 * p + 6.0 * c - 4.0 * m + mm) / (h * h * h * h)),
        )
    } else {
        (None, None)
    };
    Differences { d1, d2, d3, d4 }
}

/// Estimated relative truncation error of `R R'' - beta (1 + R'^2)` by
/// central differences: `h^2 (R |R''''| / 12 + beta |R'| |R'''| / 3) / scale`.
/// Infinite where the wider stencil is unavailable.
pub(crate) fn truncation_estimate(d: &Differences, value: f64, h: f64, beta: f64, scale: f64) -> f64 {
    match (d.d3, d.d4) {
        (Some(d3), Some(d4)) => h * h * (value * d4.abs() / 12.0 + beta * d.d1.abs() * d3.abs() / 3.0) / scale,
        _ => f64::INFINITY,
    }
}
