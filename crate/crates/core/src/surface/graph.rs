use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::geom::Point;
use crate::io::{read_table, write_table};
use crate::profile::PExponent;

use super::patch::{Orientation, Patch};

const AXES: [&str; 3] = ["x", "y", "z"];
const INDICES: [&str; 3] = ["i", "j", "k"];

/// Values of a function on a uniform rectangular grid in `R^n`, `n ∈ {2, 3}`.
///
/// Node `(i, j)` sits at `(x0 + i hx, y0 + j hy)` and is stored at `i ny + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    shape: Vec<usize>,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    values: Vec<f64>,
}

/// Central-difference gradient and Hessian at a node.
#[derive(Debug, Clone)]
pub struct GraphJet {
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

impl GraphFunction {
    pub fn new(shape: Vec<usize>, origin: Vec<f64>, spacing: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if !(2..=3).contains(&n) || origin.len() != n || spacing.len() != n {
            return domain("graphs live over 2- or 3-dimensional grids");
        }
        if shape.iter().any(|&s| s < 3) {
            return domain("every graph axis needs at least three nodes");
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) || origin.iter().any(|o| !o.is_finite()) {
            return domain("graph spacing must be positive and the origin finite");
        }
        if values.len() != shape.iter().product::<usize>() {
            return domain("value count does not match the grid");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("graph values must be finite");
        }
        Ok(GraphFunction { shape, origin, spacing, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(shape: Vec<usize>, origin: Vec<f64>, spacing: Vec<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let count: usize = shape.iter().product();
        let probe = GraphFunction { shape: shape.clone(), origin: origin.clone(), spacing: spacing.clone(), values: vec![] };
        let values = (0..count).map(|k| f(&probe.coords(&probe.node(k)))).collect();
        GraphFunction::new(shape, origin, spacing, values)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn h(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn flat(&self, node: &[usize]) -> usize {
        node.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn node(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn coords(&self, node: &[usize]) -> Vec<f64> {
        node.iter().enumerate().map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a]).collect()
    }

    pub fn value(&self, node: &[usize]) -> f64 {
        self.values[self.flat(node)]
    }

    pub fn is_interior(&self, node: &[usize]) -> bool {
        node.len() == self.dim() && node.iter().zip(&self.shape).all(|(&i, &s)| i >= 1 && i + 1 < s)
    }

    pub fn is_boundary(&self, node: &[usize]) -> bool {
        node.iter().zip(&self.shape).any(|(&i, &s)| i == 0 || i + 1 == s)
    }

    fn shifted(&self, node: &[usize], moves: &[(usize, isize)]) -> f64 {
        let mut idx = node.to_vec();
        for &(a, d) in moves {
            idx[a] = (idx[a] as isize + d) as usize;
        }
        self.value(&idx)
    }

    /// Central differences of first and second order at an interior node.
    pub fn jet(&self, node: &[usize]) -> Result<GraphJet> {
        if !self.is_interior(node) {
            return domain(format!("node {node:?} is not interior"));
        }
        let n = self.dim();
        let f0 = self.value(node);
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for a in 0..n {
            let h = self.spacing[a];
            let fp = self.shifted(node, &[(a, 1)]);
            let fm = self.shifted(node, &[(a, -1)]);
            grad[a] = (fp - fm) / (2.0 * h);
            hess[a][a] = (fp - 2.0 * f0 + fm) / (h * h);
            for b in a + 1..n {
                let v = (self.shifted(node, &[(a, 1), (b, 1)]) - self.shifted(node, &[(a, 1), (b, -1)])
                    - self.shifted(node, &[(a, -1), (b, 1)])
                    + self.shifted(node, &[(a, -1), (b, -1)]))
                    / (4.0 * h * self.spacing[b]);
                hess[a][b] = v;
                hess[b][a] = v;
            }
        }
        Ok(GraphJet { grad, hess })
    }

    /// The graph `{(x, f(x))}` as an upward-oriented patch.
    pub fn to_patch(&self) -> Result<Patch> {
        let n = self.dim();
        let positions = (0..self.values.len())
            .map(|k| {
                let mut c = self.coords(&self.node(k));
                c.push(self.values[k]);
                Point::new(c)
            })
            .collect();
        Patch::new(
            self.shape.clone(),
            self.origin.clone(),
            self.spacing.clone(),
            vec![false; n],
            positions,
            Orientation::Upward,
        )
    }

    /// Columns `i,j,x,y,f` (with `k`, `z` in three dimensions).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let n = self.dim();
        let mut header: Vec<String> = INDICES[..n].iter().chain(&AXES[..n]).map(|s| s.to_string()).collect();
        header.push("f".into());
        let rows = (0..self.values.len()).map(|k| {
            let node = self.node(k);
            let mut row: Vec<f64> = node.iter().map(|&i| i as f64).collect();
            row.extend(self.coords(&node));
            row.push(self.values[k]);
            row
        });
        write_table(path, &header, rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (header, rows) = read_table(path)?;
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        let n = (header.len().saturating_sub(1)) / 2;
        let mut expected: Vec<&str> = INDICES[..n.min(3)].to_vec();
        expected.extend(&AXES[..n.min(3)]);
        expected.push("f");
        if !(2..=3).contains(&n) || header != expected {
            return Err(parse_err(format!("expected header {}", expected.join(","))));
        }
        let mut shape = vec![0usize; n];
        for row in &rows {
            for a in 0..n {
                shape[a] = shape[a].max(row[a] as usize + 1);
            }
        }
        if rows.len() != shape.iter().product::<usize>() {
            return Err(parse_err("rows do not fill a rectangular grid".into()));
        }
        let origin: Vec<f64> = (0..n).map(|a| rows[0][n + a]).collect();
        let last = &rows[rows.len() - 1];
        let spacing: Vec<f64> = (0..n).map(|a| (last[n + a] - origin[a]) / (shape[a] - 1) as f64).collect();
        let mut values = vec![f64::NAN; rows.len()];
        let probe = GraphFunction { shape: shape.clone(), origin: origin.clone(), spacing: spacing.clone(), values: vec![] };
        for row in &rows {
            let node: Vec<usize> = row[..n].iter().map(|&v| v as usize).collect();
            values[probe.flat(&node)] = row[2 * n];
        }
        GraphFunction::new(shape, origin, spacing, values).map_err(|e| parse_err(e.to_string()))
    }
}

/// The nonparametric operator
/// `g |∇f|^2 Δf + (p - 2 - |∇f|^2) Σ_{l,s} f_l f_s f_ls`, `g = 1 + |∇f|^2`,
/// from its derivatives.
pub fn nonparametric_operator(jet: &GraphJet, p: f64) -> f64 {
    let n = jet.grad.len();
    let s: f64 = jet.grad.iter().map(|v| v * v).sum();
    let trace: f64 = (0..n).map(|a| jet.hess[a][a]).sum();
    let mut quad = 0.0;
    for l in 0..n {
        for m in 0..n {
            quad += jet.grad[l] * jet.grad[m] * jet.hess[l][m];
        }
    }
    (1.0 + s) * s * trace + (p - 2.0 - s) * quad
}

/// The nonparametric operator at an interior node, by central differences.
pub fn nonparametric_residual(g: &GraphFunction, p: PExponent, node: &[usize]) -> Result<f64> {
    Ok(nonparametric_operator(&g.jet(node)?, p.value()))
}
