use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{min_enclosing_ball, sigma, Ball, Point, PointCloud, DEFAULT_CONTACT_TOL};
use crate::profile::ModelSurface;
use crate::surface::Patch;

/// Fewest points a section may carry.
pub const MIN_SECTION_POINTS: usize = 8;

/// A horizontal slice of a tube, projected to `R^n`, with its circumscribed
/// ball and contact spread.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub tau: f64,
    pub points: PointCloud,
    pub ball: Ball,
    pub sigma: f64,
}

impl Section {
    pub fn from_points(tau: f64, points: Vec<Point>) -> Result<Self> {
        if points.len() < MIN_SECTION_POINTS {
            return Err(Error::TubeViolation(format!(
                "section at tau = {tau} has {} points, need at least {MIN_SECTION_POINTS}",
                points.len()
            )));
        }
        let points = PointCloud::new(points)?;
        let ball = min_enclosing_ball(&points)?;
        let sigma = sigma(&points, &ball, DEFAULT_CONTACT_TOL)?;
        Ok(Section { tau, points, ball, sigma })
    }

    /// Section points lifted back to height `tau`.
    pub fn lifted(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.lifted(self.tau)).collect()
    }
}

/// A sampled hypersurface to be sliced.
#[derive(Debug, Clone, Copy)]
pub enum SurfaceSource<'a> {
    Model(&'a ModelSurface),
    Patch(&'a Patch),
}

/// Sections at the requested heights.
///
/// For a model surface each height must be within half a grid step of a
/// profile node, and the section is that node's ring. For a patch the section
/// is the polygon cut by the plane out of the grid edges. A section that
/// reaches a patch boundary face along which the height varies is not
/// compact, and is rejected.
pub fn extract_sections(surface: SurfaceSource<'_>, taus: &[f64]) -> Result<Vec<Section>> {
    match surface {
        SurfaceSource::Model(m) => taus.par_iter().map(|&t| model_section(m, t)).collect(),
        SurfaceSource::Patch(p) => {
            let faces = face_heights(p);
            taus.par_iter().map(|&t| patch_section(p, &faces, t)).collect()
        }
    }
}

/// One section per profile node, taking every `stride`-th node.
pub fn model_sections(surface: &ModelSurface, stride: usize) -> Result<Vec<Section>> {
    let stride = stride.max(1);
    let idx: Vec<usize> = (0..surface.profile.len()).step_by(stride).collect();
    idx.par_iter()
        .map(|&k| {
            let pts = surface.section(k).iter().map(Point::projected).collect();
            Section::from_points(surface.profile.tau[k], pts)
        })
        .collect()
}

fn model_section(m: &ModelSurface, tau: f64) -> Result<Section> {
    let prof = &m.profile;
    let h = prof.h();
    let k = ((tau - prof.tau[0]) / h).round();
    if k < 0.0 || k as usize >= prof.len() || (prof.tau[k as usize] - tau).abs() > 0.5 * h {
        return Err(Error::TubeViolation(format!("no sampled section at tau = {tau}")));
    }
    let k = k as usize;
    let pts = m.section(k).iter().map(Point::projected).collect();
    Section::from_points(prof.tau[k], pts)
}

/// For every non-periodic boundary face `(axis, side)`: whether the height
/// is constant on it.
fn face_heights(p: &Patch) -> Vec<(usize, usize, bool)> {
    let n = p.dim();
    let last = n;
    let mut faces = Vec::new();
    for a in 0..n {
        if p.periodic()[a] {
            continue;
        }
        for side in [0, p.shape()[a] - 1] {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (f, x) in p.positions().iter().enumerate() {
                if p.node(f)[a] == side {
                    lo = lo.min(x[last]);
                    hi = hi.max(x[last]);
                }
            }
            let constant = hi - lo <= 1e-12 * (1.0 + hi.abs().max(lo.abs()));
            faces.push((a, side, constant));
        }
    }
    faces
}

fn on_varying_face(faces: &[(usize, usize, bool)], a: &[usize], b: &[usize]) -> bool {
    faces.iter().any(|&(axis, side, constant)| !constant && a[axis] == side && b[axis] == side)
}

fn patch_section(p: &Patch, faces: &[(usize, usize, bool)], tau: f64) -> Result<Section> {
    let n = p.dim();
    let mut pts = Vec::new();
    let mut touches = false;
    for f in 0..p.len() {
        let node = p.node(f);
        let x0 = &p.positions()[f];
        let z0 = x0[n];
        if z0 == tau {
            pts.push(x0.projected());
            touches |= on_varying_face(faces, &node, &node);
        }
        for a in 0..n {
            let mut off = vec![0isize; n];
            off[a] = 1;
            let Some(next) = p.shifted(&node, &off) else { continue };
            let x1 = p.at(&next)?;
            let z1 = x1[n];
            if (z0 - tau) * (z1 - tau) < 0.0 {
                let s = (tau - z0) / (z1 - z0);
                pts.push(x0.axpy(s, &x1.sub(x0)).projected());
                touches |= on_varying_face(faces, &node, &next);
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::TubeViolation(format!("section at tau = {tau} is empty")));
    }
    if touches {
        return Err(Error::TubeViolation(format!(
            "section at tau = {tau} runs into the boundary of the sample; it is not compact"
        )));
    }
    Section::from_points(tau, pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{sample_model_surface, Profile};
    use crate::surface::Orientation;
    use std::f64::consts::PI;

    fn catenoid_patch() -> Patch {
        Patch::from_fn(
            vec![96, 41],
            vec![0.0, -1.0],
            vec![2.0 * PI / 96.0, 0.05],
            vec![true, false],
            Orientation::AwayFromLine { origin: Point::zeros(3), direction: Point::basis(3, 2) },
            |u| {
                let r = u[1].cosh();
                Point::from([r * u[0].cos(), r * u[0].sin(), u[1]])
            },
        )
        .unwrap()
    }

    #[test]
    fn cylinder_sections_are_unit_circles() {
        let prof = Profile::from_radius(2, Profile::symmetric_grid(1.0, 0.1).unwrap(), |_| (1.0, 0.0, 0.0)).unwrap();
        let m = sample_model_surface(&prof, 32).unwrap();
        let secs = extract_sections(SurfaceSource::Model(&m), &[-1.0, 0.0, 0.52]).unwrap();
        assert_eq!(secs.len(), 3);
        assert!((secs[2].tau - 0.5).abs() < 1e-15);
        for s in &secs {
            assert!((s.ball.radius - 1.0).abs() < 1e-12);
            assert!(s.sigma > 0.99);
        }
        assert!(extract_sections(SurfaceSource::Model(&m), &[1.2]).is_err());
        assert_eq!(model_sections(&m, 2).unwrap().len(), 11);
    }

    #[test]
    fn catenoid_patch_sections() {
        let p = catenoid_patch();
        for t in [-0.63, 0.0, 0.31, 0.77] {
            let s = &extract_sections(SurfaceSource::Patch(&p), &[t]).unwrap()[0];
            assert!((s.ball.radius - t.cosh()).abs() < 2e-3, "{t}: {}", s.ball.radius);
            assert!(s.ball.center.norm() < 1e-3);
        }
    }

    #[test]
    fn half_plane_is_not_a_tube() {
        let p = Patch::from_fn(
            vec![20, 20],
            vec![0.0, -1.0],
            vec![0.1, 0.1],
            vec![false, false],
            Orientation::Parametric,
            |u| Point::from([u[0], 0.0, u[1]]),
        )
        .unwrap();
        let r = extract_sections(SurfaceSource::Patch(&p), &[0.05]);
        assert!(matches!(r, Err(Error::TubeViolation(_))), "{r:?}");
    }

    #[test]
    fn empty_section() {
        let r = extract_sections(SurfaceSource::Patch(&catenoid_patch()), &[3.0]);
        assert!(matches!(r, Err(Error::TubeViolation(_))));
    }
}
