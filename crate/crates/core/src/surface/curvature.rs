//! Second-order finite-difference curvature at a patch node.
//!
//! Sign convention: `II_ab = <x_ab, nu>` and the shape operator is
//! `A = I^{-1} II`, so the unit sphere with outward normal has `A = -Id`.

use nalgebra::{DMatrix, DVector};

use super::patch::{Orientation, Patch};
use crate::error::{domain, Error, Result};
use crate::geom::Point;
use crate::profile::PExponent;

/// Metrics with a larger condition number are treated as degenerate.
pub const MAX_METRIC_CONDITION: f64 = 1e12;

/// `|e^T|` at or below this marks a critical point of the height function.
pub const CRITICAL_TOL: f64 = 1e-9;

/// Differential-geometric data at one node.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub normal: Point,
    /// Orthonormal tangent frame `E_1, .., E_n` in ambient coordinates.
    pub frame: Vec<Point>,
    /// Shape operator in `frame`; symmetric.
    pub shape_operator: DMatrix<f64>,
    /// Principal curvatures, ascending.
    pub principal: Vec<f64>,
    /// Unit principal directions in ambient coordinates, matching `principal`.
    pub principal_directions: Vec<Point>,
    /// `H = tr A`.
    pub mean: f64,
    /// Tangential part `e^T = e - <e, nu> nu`.
    pub e_tangent: Point,
    /// `<e, nu>`.
    pub omega: f64,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Components of `e^T` in `frame`.
    pub fn e_tangent_in_frame(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.frame.iter().map(|f| f.dot(&self.e_tangent)))
    }

    /// Frobenius norm of the shape operator.
    pub fn shape_norm(&self) -> f64 {
        self.shape_operator.norm()
    }
}

/// Generalized cross product: `det[x_1, .., x_n, nu] = |nu|^2` and `nu ⊥ x_a`.
fn cofactor_normal(tangents: &[Point]) -> Point {
    let n = tangents.len();
    let m = n + 1;
    let coords = (0..m)
        .map(|k| {
            let minor = DMatrix::from_fn(n, n, |r, c| {
                let row = if r < k { r } else { r + 1 };
                tangents[c][row]
            });
            let sign = if (k + n).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect();
    Point::new(coords)
}

fn orient(normal: Point, position: &Point, orientation: &Orientation) -> Point {
    let flip = match orientation {
        Orientation::Upward => normal[normal.dim() - 1] < 0.0,
        Orientation::AwayFromLine { origin, direction } => {
            let d = direction.normalized().expect("validated non-zero");
            let rel = position.sub(origin);
            let radial = rel.axpy(-rel.dot(&d), &d);
            normal.dot(&radial) < 0.0
        }
        Orientation::AwayFromPoint { center } => normal.dot(&position.sub(center)) < 0.0,
        Orientation::Parametric => false,
    };
    if flip {
        normal.scale(-1.0)
    } else {
        normal
    }
}

/// Metric `I_ab = <x_a, x_b>` with its condition check.
pub(crate) fn metric(tangents: &[Point], node: &[usize]) -> Result<DMatrix<f64>> {
    let n = tangents.len();
    let g = DMatrix::from_fn(n, n, |a, b| tangents[a].dot(&tangents[b]));
    let eig = g.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_METRIC_CONDITION) {
        return Err(Error::DegenerateMetric { node: node.to_vec(), condition });
    }
    Ok(g)
}

/// Normal, fundamental forms, shape operator and the splitting of the unit
/// vector `e` at an interior node.
pub fn curvature_at(patch: &Patch, node: &[usize], e: &Point) -> Result<CurvatureData> {
    let n = patch.dim();
    if e.dim() != n + 1 {
        return domain(format!("e must have dimension {}", n + 1));
    }
    if (e.norm() - 1.0).abs() > 1e-12 {
        return domain("e must be a unit vector");
    }
    if !patch.is_interior(node, 1) {
        return domain(format!("node {node:?} is not interior"));
    }
    let x = patch.tangents(node)?;
    let g = metric(&x, node)?;
    let normal = cofactor_normal(&x)
        .normalized()
        .ok_or_else(|| Error::DegenerateMetric { node: node.to_vec(), condition: f64::INFINITY })?;
    let normal = orient(normal, patch.at(node)?, patch.orientation());

    let xx = patch.second_derivatives(node)?;
    let second = DMatrix::from_fn(n, n, |a, b| xx[a][b].dot(&normal));

    let chol = g.cholesky().ok_or_else(|| Error::DegenerateMetric {
        node: node.to_vec(),
        condition: f64::INFINITY,
    })?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric { node: node.to_vec(), condition: f64::INFINITY })?;
    let a = &l_inv * &second * l_inv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    // E_i = Σ_b (L^{-1})_{ib} x_b
    let frame: Vec<Point> = (0..n)
        .map(|i| {
            (0..n).fold(Point::zeros(n + 1), |acc, b| acc.axpy(l_inv[(i, b)], &x[b]))
        })
        .collect();

    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let principal: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let principal_directions = order
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            (0..n).fold(Point::zeros(n + 1), |acc, b| acc.axpy(v[b], &frame[b]))
        })
        .collect();

    let omega = e.dot(&normal);
    let e_tangent = e.axpy(-omega, &normal);
    Ok(CurvatureData {
        normal,
        frame,
        mean: a.trace(),
        shape_operator: a,
        principal,
        principal_directions,
        e_tangent,
        omega,
    })
}

fn unit_tangent_in_frame(data: &CurvatureData) -> Result<(DVector<f64>, f64)> {
    let len = data.e_tangent.norm();
    if len <= CRITICAL_TOL {
        return Err(Error::CriticalPoint(len));
    }
    Ok((data.e_tangent_in_frame() / len, len))
}

/// `k_e = <A t, t>` with `t = e^T / |e^T|`.
pub fn directional_curvature(data: &CurvatureData) -> Result<f64> {
    let (t, _) = unit_tangent_in_frame(data)?;
    Ok((&data.shape_operator * &t).dot(&t))
}

/// `H + (p - 2) k_e`, which vanishes exactly on p-minimal hypersurfaces away
/// from critical points.
pub fn mean_curvature_defect(data: &CurvatureData, p: PExponent) -> Result<f64> {
    Ok(data.mean + (p.value() - 2.0) * directional_curvature(data)?)
}

/// `Δ_p f = |e^T|^(p-2) <e, nu> (H + (p-2) k_e)` for the height `f = <x, e>`.
pub fn p_laplace_residual(data: &CurvatureData, p: PExponent) -> Result<f64> {
    let len = data.e_tangent.norm();
    Ok(len.powf(p.value() - 2.0) * data.omega * mean_curvature_defect(data, p)?)
}

/// `Δ_p f = |e^T|^(p-4) (|e^T|^2 Δf + (p-2) <e, nu> <A e^T, e^T>)` from a
/// separately supplied Laplacian `Δf`.
pub fn p_laplace_two_term(data: &CurvatureData, p: PExponent, laplacian: f64) -> Result<f64> {
    let (_, len) = unit_tangent_in_frame(data)?;
    let et = data.e_tangent_in_frame();
    let p = p.value();
    let quad = (&data.shape_operator * &et).dot(&et);
    Ok(len.powf(p - 4.0) * (len * len * laplacian + (p - 2.0) * data.omega * quad))
}

/// Laplace–Beltrami of `f = <x, e>` in divergence form,
/// `(1/√g) ∂_a (√g g^{ab} ∂_b f)`, with fluxes at the neighbouring nodes.
/// Needs a stencil margin of two on non-periodic axes.
pub fn laplace_beltrami_height(patch: &Patch, node: &[usize], e: &Point) -> Result<f64> {
    let n = patch.dim();
    if e.dim() != n + 1 {
        return domain(format!("e must have dimension {}", n + 1));
    }
    if !patch.is_interior(node, 2) {
        return domain(format!("node {node:?} needs a margin of two"));
    }
    let flux = |at: &[usize], a: usize| -> Result<f64> {
        let x = patch.tangents(at)?;
        let g = metric(&x, at)?;
        let det = g.determinant();
        let inv = g.try_inverse().ok_or_else(|| Error::DegenerateMetric {
            node: at.to_vec(),
            condition: f64::INFINITY,
        })?;
        let grad: Vec<f64> = x.iter().map(|xb| xb.dot(e)).collect();
        Ok(det.sqrt() * (0..n).map(|b| inv[(a, b)] * grad[b]).sum::<f64>())
    };
    let mut div = 0.0;
    for a in 0..n {
        let mut off = vec![0isize; n];
        off[a] = 1;
        let plus = patch.shifted(node, &off).expect("margin checked");
        off[a] = -1;
        let minus = patch.shifted(node, &off).expect("margin checked");
        div += (flux(&plus, a)? - flux(&minus, a)?) / (2.0 * patch.spacing()[a]);
    }
    let g = metric(&patch.tangents(node)?, node)?;
    Ok(div / g.determinant().sqrt())
}

/// `|Δf - H <e, nu>|` for `f = <x, e>`.
pub fn laplace_identity_residual(
    data: &CurvatureData,
    patch: &Patch,
    node: &[usize],
    e: &Point,
) -> Result<f64> {
    let lap = laplace_beltrami_height(patch, node, e)?;
    Ok((lap - data.mean * data.omega).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere(h: f64) -> Patch {
        // Colatitude in [0.5, 2.5], longitude periodic.
        let m = (2.0 * PI / h).round() as usize;
        let hp = 2.0 * PI / m as f64;
        let k = (2.0 / h).round() as usize + 1;
        Patch::from_fn(
            vec![k, m],
            vec![0.5, 0.0],
            vec![2.0 / (k - 1) as f64, hp],
            vec![false, true],
            Orientation::AwayFromPoint { center: Point::zeros(3) },
            |u| Point::from([u[0].sin() * u[1].cos(), u[0].sin() * u[1].sin(), u[0].cos()]),
        )
        .unwrap()
    }

    fn cylinder(h: f64) -> Patch {
        let m = (2.0 * PI / h).round() as usize;
        Patch::from_fn(
            vec![m, 11],
            vec![0.0, -0.5],
            vec![2.0 * PI / m as f64, 0.1],
            vec![true, false],
            Orientation::AwayFromLine { origin: Point::zeros(3), direction: Point::basis(3, 2) },
            |u| Point::from([u[0].cos(), u[0].sin(), u[1]]),
        )
        .unwrap()
    }

    #[test]
    fn plane_is_flat() {
        let p = Patch::from_fn(
            vec![5, 5],
            vec![0.0, 0.0],
            vec![0.3, 0.3],
            vec![false, false],
            Orientation::Upward,
            |u| Point::from([u[0] + u[1], u[1], 0.5 * u[0]]),
        )
        .unwrap();
        let e = Point::from([0.6, 0.0, 0.8]);
        let d = curvature_at(&p, &[2, 2], &e).unwrap();
        assert!(d.mean.abs() < 1e-12 && d.shape_norm() < 1e-12);
        assert!(d.normal[2] > 0.0);
        let p2 = PExponent::new(3.0).unwrap();
        assert!(p_laplace_residual(&d, p2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sphere_outward_curvature() {
        let p = sphere(0.01);
        let e = Point::basis(3, 2);
        let node = [100, 37];
        let d = curvature_at(&p, &node, &e).unwrap();
        for l in &d.principal {
            assert!((l + 1.0).abs() < 1e-4, "{l}");
        }
        assert!((d.mean + 2.0).abs() < 1e-4);
        assert!((d.e_tangent.norm_squared() + d.omega * d.omega - 1.0).abs() < 1e-10);
        assert!((directional_curvature(&d).unwrap() + 1.0).abs() < 1e-4);
        // The sphere is not p-minimal for any p.
        assert!(mean_curvature_defect(&d, PExponent::new(3.0).unwrap()).unwrap().abs() > 1.0);
    }

    #[test]
    fn cylinder_principal_curvatures() {
        let p = cylinder(0.01);
        let d = curvature_at(&p, &[40, 5], &Point::basis(3, 2)).unwrap();
        assert!((d.principal[0] + 1.0).abs() < 1e-4 && d.principal[1].abs() < 1e-10);
        assert!(directional_curvature(&d).unwrap().abs() < 1e-10);
    }

    #[test]
    fn critical_point_is_reported() {
        let p = sphere(0.05);
        // At the equator the outward normal is horizontal, so e = normal there.
        let node = [20, 0];
        let x = p.at(&node).unwrap().clone();
        let d = curvature_at(&p, &node, &x).unwrap();
        assert!(matches!(directional_curvature(&d), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn two_term_form_agrees() {
        let p = sphere(0.02);
        let e = Point::from([0.0, 0.6, 0.8]);
        let d = curvature_at(&p, &[30, 11], &e).unwrap();
        for q in [1.5, 2.0, 3.0] {
            let q = PExponent::new(q).unwrap();
            let a = p_laplace_residual(&d, q).unwrap();
            let b = p_laplace_two_term(&d, q, d.mean * d.omega).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn laplace_identity_converges_on_sphere() {
        let e = Point::basis(3, 2);
        let err = |h: f64| {
            let p = sphere(h);
            let node = [(p.shape()[0] - 1) / 4, 5];
            let d = curvature_at(&p, &node, &e).unwrap();
            laplace_identity_residual(&d, &p, &node, &e).unwrap()
        };
        let (coarse, fine) = (err(0.04), err(0.02));
        assert!(coarse < 1e-2 && fine < coarse / 3.5, "{coarse} {fine}");
    }
}
