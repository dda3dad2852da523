use std::path::Path;

use rayon::prelude::*;

use super::series::Profile;
use crate::error::{domain, Error, Result};
use crate::geom::{directions::sphere_grid, Point};
use crate::io::{read_table, write_table};

/// Smallest admissible number of directions per section.
pub const MIN_THETA_COUNT: usize = 8;

/// `w(theta, tau) = xi(tau) + R(tau) theta + tau e_{n+1}` sampled on the
/// product of the profile grid and a direction grid on `S^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSurface {
    pub profile: Profile,
    pub theta: Vec<Point>,
    /// Row-major: `samples[k * theta.len() + j]` is `w(theta_j, tau_k)`.
    pub samples: Vec<Point>,
}

impl ModelSurface {
    pub fn theta_count(&self) -> usize {
        self.theta.len()
    }

    /// Points of the section at grid index `k`, in `R^{n+1}`.
    pub fn section(&self, k: usize) -> &[Point] {
        let m = self.theta.len();
        &self.samples[k * m..(k + 1) * m]
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let n = self.profile.n();
        let mut header = vec!["tau_index".to_string(), "theta_index".to_string()];
        header.extend((1..=n + 1).map(|i| format!("x_{i}")));
        let m = self.theta.len();
        let rows = self.samples.iter().enumerate().map(|(idx, p)| {
            let mut row = vec![(idx / m) as f64, (idx % m) as f64];
            row.extend_from_slice(p.coords());
            row
        });
        write_table(path, &header, rows)
    }

    /// Reads samples written by [`ModelSurface::write_csv`] for `profile`.
    /// Directions are recovered from the first section.
    pub fn read_csv(profile: Profile, path: &Path) -> Result<Self> {
        let (header, rows) = read_table(path)?;
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        let n = profile.n();
        if header.len() != n + 3 || header[0] != "tau_index" || header[1] != "theta_index" {
            return Err(parse_err(format!("expected tau_index,theta_index,x_1..x_{}", n + 1)));
        }
        let m = rows.iter().map(|r| r[1] as usize).max().unwrap_or(0) + 1;
        if rows.len() != m * profile.len() {
            return Err(parse_err(format!(
                "{} rows do not fill a {} x {m} grid",
                rows.len(),
                profile.len()
            )));
        }
        let mut samples = Vec::with_capacity(rows.len());
        for (idx, row) in rows.iter().enumerate() {
            if row[0] as usize != idx / m || row[1] as usize != idx % m {
                return Err(parse_err(format!("row {} is out of order", idx + 1)));
            }
            samples.push(Point::new(row[2..].to_vec()));
        }
        let theta = samples[..m]
            .iter()
            .map(|w| {
                let d = Point::new(w.coords()[..n].to_vec()).sub(&profile.xi[0]);
                d.normalized().ok_or_else(|| parse_err("degenerate first section".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelSurface { profile, theta, samples })
    }
}

/// Samples `w` exactly at every grid node. For `n = 2` the directions are
/// uniform angles.
pub fn sample_model_surface(profile: &Profile, theta_count: usize) -> Result<ModelSurface> {
    if theta_count < MIN_THETA_COUNT {
        return domain(format!("theta_count must be at least {MIN_THETA_COUNT}, got {theta_count}"));
    }
    let theta = sphere_grid(profile.n(), theta_count)?;
    let samples = (0..profile.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let theta = &theta;
            theta.iter().map(move |th| model_point(profile, k, th))
        })
        .collect();
    Ok(ModelSurface { profile: profile.clone(), theta, samples })
}

fn model_point(profile: &Profile, k: usize, theta: &Point) -> Point {
    profile.xi[k].axpy(profile.r[k], theta).lifted(profile.tau[k])
}

/// Normal-section curvature of the model surface in the direction of the
/// axis, for the outward normal:
///
/// `k_e = omega^3 / R * (R R'' + R <xi'', theta> + <xi', theta>^2 - |xi'|^2)`,
/// `omega^2 = 1 / (1 + (R' + <theta, xi'>)^2)`.
pub fn k_e_model(profile: &Profile, theta: &Point, index: usize) -> Result<f64> {
    if index >= profile.len() {
        return domain(format!("grid index {index} out of range"));
    }
    if theta.dim() != profile.n() {
        return domain("theta dimension does not match the profile");
    }
    let r = profile.r[index];
    if !(r > 0.0) {
        return domain(format!("radius must be positive at node {index}"));
    }
    let (dr, ddr) = (profile.dr[index], profile.ddr[index]);
    let (dxi, ddxi) = (&profile.dxi[index], &profile.ddxi[index]);
    let slope = dr + theta.dot(dxi);
    let omega = 1.0 / (1.0 + slope * slope).sqrt();
    let bracket = r * ddr + r * ddxi.dot(theta) + theta.dot(dxi).powi(2) - dxi.norm_squared();
    Ok(omega.powi(3) / r * bracket)
}
