use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geom::Point;
use crate::io::{read_table, write_table};

/// Relative tolerance on grid uniformity.
const SPACING_TOL: f64 = 1e-9;

/// Whether a profile covers the requested span or stopped at a blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileStatus {
    Complete,
    /// The radius left every bound before the span was reached; the grid
    /// ends at the last node inside the interval of existence.
    Truncated { blow_up_at: f64 },
}

/// Radius and center series of a tube on a uniform height grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub tau: Vec<f64>,
    pub r: Vec<f64>,
    pub dr: Vec<f64>,
    pub ddr: Vec<f64>,
    pub xi: Vec<Point>,
    pub dxi: Vec<Point>,
    pub ddxi: Vec<Point>,
    pub status: ProfileStatus,
}

impl Profile {
    /// Validates lengths, uniform spacing, positivity and finiteness.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tau: Vec<f64>,
        r: Vec<f64>,
        dr: Vec<f64>,
        ddr: Vec<f64>,
        xi: Vec<Point>,
        dxi: Vec<Point>,
        ddxi: Vec<Point>,
        status: ProfileStatus,
    ) -> Result<Self> {
        let len = tau.len();
        if len < 2 {
            return domain("a profile needs at least two grid nodes");
        }
        if [r.len(), dr.len(), ddr.len(), xi.len(), dxi.len(), ddxi.len()].iter().any(|&l| l != len) {
            return domain("profile series have different lengths");
        }
        let n = xi[0].dim();
        if n < 2 {
            return domain("center series must have dimension at least 2");
        }
        if xi.iter().chain(&dxi).chain(&ddxi).any(|p| p.dim() != n || !p.is_finite()) {
            return domain("center series must be finite and of one dimension");
        }
        if tau.iter().chain(&r).chain(&dr).chain(&ddr).any(|v| !v.is_finite()) {
            return domain("profile values must be finite");
        }
        if let Some(k) = r.iter().position(|&v| v <= 0.0) {
            return domain(format!("radius must be positive, R[{k}] = {}", r[k]));
        }
        let h = (tau[len - 1] - tau[0]) / (len - 1) as f64;
        if !(h > 0.0) {
            return domain("tau grid must be strictly increasing");
        }
        for (k, w) in tau.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > SPACING_TOL * h {
                return domain(format!("tau grid is not uniform at node {k}"));
            }
        }
        Ok(Profile { tau, r, dr, ddr, xi, dxi, ddxi, status })
    }

    /// A profile with `xi ≡ 0` from closed-form radius derivatives.
    pub fn from_radius(
        n: usize,
        tau: Vec<f64>,
        radius: impl Fn(f64) -> (f64, f64, f64),
    ) -> Result<Self> {
        let mut r = Vec::with_capacity(tau.len());
        let mut dr = Vec::with_capacity(tau.len());
        let mut ddr = Vec::with_capacity(tau.len());
        for &t in &tau {
            let (a, b, c) = radius(t);
            r.push(a);
            dr.push(b);
            ddr.push(c);
        }
        let zero = vec![Point::zeros(n); tau.len()];
        Profile::new(tau, r, dr, ddr, zero.clone(), zero.clone(), zero, ProfileStatus::Complete)
    }

    /// Replaces the center series by closed-form values `(xi, xi', xi'')`.
    pub fn with_center(mut self, center: impl Fn(f64) -> (Point, Point, Point)) -> Result<Self> {
        let n = self.n();
        for (k, &t) in self.tau.iter().enumerate() {
            let (a, b, c) = center(t);
            if a.dim() != n || b.dim() != n || c.dim() != n {
                return domain("center dimension does not match the profile");
            }
            self.xi[k] = a;
            self.dxi[k] = b;
            self.ddxi[k] = c;
        }
        Ok(self)
    }

    /// Uniform grid `tau_k = k h` for `|k| <= floor(span/h)`.
    pub fn symmetric_grid(span: f64, h: f64) -> Result<Vec<f64>> {
        if !(h > 0.0) || !(span > 0.0) {
            return domain("span and step must be positive");
        }
        let half = (span / h + 1e-9).floor() as i64;
        if half < 1 {
            return domain("span is shorter than one step");
        }
        Ok((-half..=half).map(|k| k as f64 * h).collect())
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Dimension of the tube (the center lives in `R^n`).
    pub fn n(&self) -> usize {
        self.xi[0].dim()
    }

    pub fn h(&self) -> f64 {
        (self.tau[self.len() - 1] - self.tau[0]) / (self.len() - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.tau[self.len() - 1] - self.tau[0]
    }

    pub fn min_radius(&self) -> f64 {
        self.r.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let n = self.n();
        let mut header: Vec<String> = ["tau", "R", "dR", "ddR"].iter().map(|s| s.to_string()).collect();
        for prefix in ["xi", "dxi", "ddxi"] {
            header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
        }
        let rows = (0..self.len()).map(|k| {
            let mut row = vec![self.tau[k], self.r[k], self.dr[k], self.ddr[k]];
            row.extend_from_slice(self.xi[k].coords());
            row.extend_from_slice(self.dxi[k].coords());
            row.extend_from_slice(self.ddxi[k].coords());
            row
        });
        write_table(path, &header, rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (header, rows) = read_table(path)?;
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        if header.len() < 4 || (header.len() - 4) % 3 != 0 || header[..4] != ["tau", "R", "dR", "ddR"] {
            return Err(parse_err("expected header tau,R,dR,ddR,xi_*,dxi_*,ddxi_*".into()));
        }
        let n = (header.len() - 4) / 3;
        for (block, prefix) in ["xi", "dxi", "ddxi"].iter().enumerate() {
            for i in 0..n {
                if header[4 + block * n + i] != format!("{prefix}_{}", i + 1) {
                    return Err(parse_err(format!("unexpected column {}", header[4 + block * n + i])));
                }
            }
        }
        let mut cols: [Vec<f64>; 4] = Default::default();
        let (mut xi, mut dxi, mut ddxi) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            for (c, col) in cols.iter_mut().enumerate() {
                col.push(row[c]);
            }
            xi.push(Point::new(row[4..4 + n].to_vec()));
            dxi.push(Point::new(row[4 + n..4 + 2 * n].to_vec()));
            ddxi.push(Point::new(row[4 + 2 * n..4 + 3 * n].to_vec()));
        }
        let [tau, r, dr, ddr] = cols;
        Profile::new(tau, r, dr, ddr, xi, dxi, ddxi, ProfileStatus::Complete)
            .map_err(|e| parse_err(e.to_string()))
    }
}
