//! Dirichlet problem for p-minimal graphs over a rectangle.
//!
//! Damped Newton on the five-point/nine-point discretization of the
//! nonparametric operator, with continuation in `p` from the uniformly
//! elliptic case `p = 2`. The Jacobian is assembled analytically and solved by
//! banded LU.

use serde::{Deserialize, Serialize};

use super::banded::BandMatrix;
use super::graph::{nonparametric_operator, GraphFunction, GraphJet};
use crate::error::{domain, Error, Result};
use crate::profile::PExponent;

/// Largest admissible grid per axis.
pub const MAX_GRID: usize = 129;

/// Regularization `|∇f|^2 -> |∇f|^2 + EPS^2` in the linearization only.
const EPS: f64 = 1e-8;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Target for the largest interior residual.
    pub tol: f64,
    /// Newton iterations per continuation stage.
    pub max_iterations: usize,
    /// Continuation step in `p`.
    pub continuation_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iterations: 60, continuation_step: 0.25 }
    }
}

/// A converged solve.
#[derive(Debug, Clone)]
pub struct GraphSolution {
    pub graph: GraphFunction,
    /// Largest interior `|residual|`, unregularized.
    pub residual: f64,
    /// Newton iterations summed over all stages.
    pub iterations: usize,
    /// The exponents visited by continuation.
    pub stages: Vec<f64>,
}

/// Uniform grid over `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl GridSpec {
    pub fn square(nodes: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        GridSpec { nx: nodes, ny: nodes, x0, x1, y0, y1 }
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.ny < 3 || self.nx > MAX_GRID || self.ny > MAX_GRID {
            return domain(format!("grid must be between 3x3 and {MAX_GRID}x{MAX_GRID}"));
        }
        if !(self.x1 > self.x0) || !(self.y1 > self.y0) {
            return domain("grid extent must be positive");
        }
        Ok(())
    }

    fn spacing(&self) -> [f64; 2] {
        [(self.x1 - self.x0) / (self.nx - 1) as f64, (self.y1 - self.y0) / (self.ny - 1) as f64]
    }

    /// Doubles the resolution: `n -> 2n - 1` nodes per axis.
    pub fn refined(&self) -> Self {
        GridSpec { nx: 2 * self.nx - 1, ny: 2 * self.ny - 1, ..*self }
    }
}

/// Solves with boundary values `boundary(x, y)`, starting from the Coons
/// patch of the boundary data at `p = 2`.
pub fn solve_p_minimal_graph(
    boundary: &dyn Fn(f64, f64) -> f64,
    p: PExponent,
    grid: GridSpec,
    options: &SolverOptions,
) -> Result<GraphSolution> {
    grid.validate()?;
    validate_options(options)?;
    let mut g = coons_patch(boundary, &grid)?;
    let target = p.value();
    let mut stages = Vec::new();
    let mut current = 2.0;
    let mut iterations = 0;
    loop {
        iterations += newton(&mut g, current, options)?;
        stages.push(current);
        if current == target {
            break;
        }
        let step = options.continuation_step.min((target - current).abs());
        current = if (target - current).abs() <= step * (1.0 + 1e-12) {
            target
        } else {
            current + step * (target - current).signum()
        };
    }
    let residual = max_residual(&g, target);
    Ok(GraphSolution { graph: g, residual, iterations, stages })
}

/// Prolongs a converged solution to the refined grid by bilinear
/// interpolation, resets the boundary, and re-solves at `p` directly.
pub fn refine_p_minimal_graph(
    coarse: &GraphFunction,
    boundary: &dyn Fn(f64, f64) -> f64,
    p: PExponent,
    options: &SolverOptions,
) -> Result<GraphSolution> {
    validate_options(options)?;
    if coarse.dim() != 2 {
        return domain("only two-dimensional graphs can be solved");
    }
    let (cx, cy) = (coarse.shape()[0], coarse.shape()[1]);
    let (nx, ny) = (2 * cx - 1, 2 * cy - 1);
    if nx > MAX_GRID || ny > MAX_GRID {
        return domain(format!("refined grid exceeds {MAX_GRID}x{MAX_GRID}"));
    }
    let h = [coarse.spacing()[0] / 2.0, coarse.spacing()[1] / 2.0];
    let origin = coarse.origin().to_vec();
    let fine = GraphFunction::from_fn(vec![nx, ny], origin.clone(), h.to_vec(), |x| {
        let i = (((x[0] - origin[0]) / h[0]).round() as usize).min(nx - 1);
        let j = (((x[1] - origin[1]) / h[1]).round() as usize).min(ny - 1);
        if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
            return boundary(x[0], x[1]);
        }
        let (i0, i1) = (i / 2, i.div_ceil(2));
        let (j0, j1) = (j / 2, j.div_ceil(2));
        0.25 * (coarse.value(&[i0, j0]) + coarse.value(&[i1, j0]) + coarse.value(&[i0, j1]) + coarse.value(&[i1, j1]))
    })?;
    let mut g = fine;
    let iterations = newton(&mut g, p.value(), options)?;
    let residual = max_residual(&g, p.value());
    Ok(GraphSolution { graph: g, residual, iterations, stages: vec![p.value()] })
}

fn validate_options(o: &SolverOptions) -> Result<()> {
    if !(o.tol > 0.0) || o.max_iterations == 0 || !(o.continuation_step > 0.0) {
        return domain("solver tolerance, iteration cap and continuation step must be positive");
    }
    Ok(())
}

/// Transfinite interpolation of the boundary values.
fn coons_patch(boundary: &dyn Fn(f64, f64) -> f64, grid: &GridSpec) -> Result<GraphFunction> {
    let (x0, x1, y0, y1) = (grid.x0, grid.x1, grid.y0, grid.y1);
    let [hx, hy] = grid.spacing();
    GraphFunction::from_fn(vec![grid.nx, grid.ny], vec![x0, y0], vec![hx, hy], |x| {
        let (s, t) = ((x[0] - x0) / (x1 - x0), (x[1] - y0) / (y1 - y0));
        let (x, y) = (x[0], x[1]);
        (1.0 - s) * boundary(x0, y) + s * boundary(x1, y) + (1.0 - t) * boundary(x, y0) + t * boundary(x, y1)
            - (1.0 - s) * (1.0 - t) * boundary(x0, y0)
            - s * (1.0 - t) * boundary(x1, y0)
            - (1.0 - s) * t * boundary(x0, y1)
            - s * t * boundary(x1, y1)
    })
}

fn unknown(i: usize, j: usize, ny: usize) -> usize {
    (i - 1) * (ny - 2) + (j - 1)
}

fn residual_vector(g: &GraphFunction, p: f64) -> Vec<f64> {
    let (nx, ny) = (g.shape()[0], g.shape()[1]);
    let mut out = Vec::with_capacity((nx - 2) * (ny - 2));
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let jet = g.jet(&[i, j]).expect("interior node");
            out.push(nonparametric_operator(&jet, p));
        }
    }
    out
}

/// Largest interior `|residual|` of `g` at exponent `p`.
pub fn max_residual(g: &GraphFunction, p: f64) -> f64 {
    residual_vector(g, p).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Partial derivatives of the operator with respect to
/// `(f_x, f_y, f_xx, f_yy, f_xy)`, regularized.
fn operator_partials(jet: &GraphJet, p: f64) -> [f64; 5] {
    let (fx, fy) = (jet.grad[0], jet.grad[1]);
    let (fxx, fyy, fxy) = (jet.hess[0][0], jet.hess[1][1], jet.hess[0][1]);
    let s = fx * fx + fy * fy + EPS * EPS;
    let g = 1.0 + s;
    let t = fxx + fyy;
    let q = fx * fx * fxx + 2.0 * fx * fy * fxy + fy * fy * fyy;
    let c = p - 2.0 - s;
    let d_fx = 2.0 * fx * (s + g) * t - 2.0 * fx * q + c * (2.0 * fx * fxx + 2.0 * fy * fxy);
    let d_fy = 2.0 * fy * (s + g) * t - 2.0 * fy * q + c * (2.0 * fy * fyy + 2.0 * fx * fxy);
    [d_fx, d_fy, g * s + c * fx * fx, g * s + c * fy * fy, 2.0 * c * fx * fy]
}

fn jacobian(g: &GraphFunction, p: f64) -> BandMatrix {
    let (nx, ny) = (g.shape()[0], g.shape()[1]);
    let (hx, hy) = (g.spacing()[0], g.spacing()[1]);
    let size = (nx - 2) * (ny - 2);
    let band = ny - 1;
    let mut m = BandMatrix::zeros(size, band, band);
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let row = unknown(i, j, ny);
            let jet = g.jet(&[i, j]).expect("interior node");
            let [a_x, a_y, a_xx, a_yy, a_xy] = operator_partials(&jet, p);
            let mut put = |di: isize, dj: isize, v: f64| {
                let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                if ii == 0 || jj == 0 || ii == nx - 1 || jj == ny - 1 || v == 0.0 {
                    return;
                }
                m.add(row, unknown(ii, jj, ny), v);
            };
            put(0, 0, -2.0 * a_xx / (hx * hx) - 2.0 * a_yy / (hy * hy));
            put(1, 0, a_x / (2.0 * hx) + a_xx / (hx * hx));
            put(-1, 0, -a_x / (2.0 * hx) + a_xx / (hx * hx));
            put(0, 1, a_y / (2.0 * hy) + a_yy / (hy * hy));
            put(0, -1, -a_y / (2.0 * hy) + a_yy / (hy * hy));
            let c = a_xy / (4.0 * hx * hy);
            put(1, 1, c);
            put(-1, -1, c);
            put(1, -1, -c);
            put(-1, 1, -c);
        }
    }
    m
}

fn apply(g: &mut GraphFunction, step: &[f64], alpha: f64) {
    let (nx, ny) = (g.shape()[0], g.shape()[1]);
    let vals = g.values_mut();
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            vals[i * ny + j] += alpha * step[unknown(i, j, ny)];
        }
    }
}

fn half_norm2(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Damped Newton with Armijo backtracking on `½|F|^2`. Returns the number
/// of iterations taken.
fn newton(g: &mut GraphFunction, p: f64, options: &SolverOptions) -> Result<usize> {
    let mut r = residual_vector(g, p);
    let mut phi = half_norm2(&r);
    for it in 0..options.max_iterations {
        let worst = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if worst <= options.tol {
            return Ok(it);
        }
        let lu = jacobian(g, p).factor().map_err(|_| Error::Convergence {
            residual: worst,
            iterations: it,
            p,
        })?;
        let mut step: Vec<f64> = r.iter().map(|v| -v).collect();
        lu.solve(&mut step);
        let mut alpha = 1.0;
        let accepted = loop {
            let mut trial = g.clone();
            apply(&mut trial, &step, alpha);
            let rt = residual_vector(&trial, p);
            let phi_t = half_norm2(&rt);
            if phi_t.is_finite() && phi_t <= (1.0 - 1e-4 * alpha) * phi {
                *g = trial;
                r = rt;
                phi = phi_t;
                break true;
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                break false;
            }
        };
        if !accepted {
            return Err(Error::Convergence { residual: worst, iterations: it + 1, p });
        }
    }
    let worst = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if worst <= options.tol {
        return Ok(options.max_iterations);
    }
    Err(Error::Convergence { residual: worst, iterations: options.max_iterations, p })
}
