use crate::error::{domain, Result};
use crate::geom::Point;

/// How the unit normal of a patch is signed.
#[derive(Debug, Clone, PartialEq)]
pub enum Orientation {
    /// Last ambient coordinate of the normal is positive (graphs).
    Upward,
    /// Normal points away from the line `origin + s direction` (tubes).
    AwayFromLine { origin: Point, direction: Point },
    /// Normal points away from a point (spheres).
    AwayFromPoint { center: Point },
    /// `det[x_1, .., x_n, nu] > 0` in parameter order.
    Parametric,
}

/// A hypersurface sampled on a uniform rectangular parameter grid.
///
/// Node `(i_1, .., i_n)` is stored at flat index `Σ i_a stride_a` with the
/// last axis fastest, and has parameters `origin_a + i_a spacing_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    shape: Vec<usize>,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    periodic: Vec<bool>,
    positions: Vec<Point>,
    orientation: Orientation,
}

impl Patch {
    pub fn new(
        shape: Vec<usize>,
        origin: Vec<f64>,
        spacing: Vec<f64>,
        periodic: Vec<bool>,
        positions: Vec<Point>,
        orientation: Orientation,
    ) -> Result<Self> {
        let n = shape.len();
        if n == 0 || origin.len() != n || spacing.len() != n || periodic.len() != n {
            return domain("patch axes are inconsistent");
        }
        if shape.iter().any(|&s| s < 3) {
            return domain("every patch axis needs at least three nodes");
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return domain("patch spacing must be positive");
        }
        let count: usize = shape.iter().product();
        if positions.len() != count {
            return domain(format!("expected {count} positions, got {}", positions.len()));
        }
        if positions.iter().any(|p| p.dim() != n + 1 || !p.is_finite()) {
            return domain(format!("positions must be finite points of dimension {}", n + 1));
        }
        let ambient_ok = match &orientation {
            Orientation::AwayFromLine { origin, direction } => {
                origin.dim() == n + 1 && direction.dim() == n + 1 && direction.norm() > 0.0
            }
            Orientation::AwayFromPoint { center } => center.dim() == n + 1,
            _ => true,
        };
        if !ambient_ok {
            return domain("orientation data has the wrong dimension");
        }
        Ok(Patch { shape, origin, spacing, periodic, positions, orientation })
    }

    /// Samples `map(parameters)` on the grid.
    pub fn from_fn(
        shape: Vec<usize>,
        origin: Vec<f64>,
        spacing: Vec<f64>,
        periodic: Vec<bool>,
        orientation: Orientation,
        map: impl Fn(&[f64]) -> Point,
    ) -> Result<Self> {
        let count: usize = shape.iter().product();
        let mut positions = Vec::with_capacity(count);
        let mut idx = vec![0usize; shape.len()];
        let mut params = vec![0.0; shape.len()];
        for flat in 0..count {
            unflatten(&shape, flat, &mut idx);
            for a in 0..shape.len() {
                params[a] = origin.get(a).copied().unwrap_or(0.0)
                    + idx[a] as f64 * spacing.get(a).copied().unwrap_or(1.0);
            }
            positions.push(map(&params));
        }
        Patch::new(shape, origin, spacing, periodic, positions, orientation)
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    /// Largest parameter spacing.
    pub fn h(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn flat(&self, node: &[usize]) -> Result<usize> {
        if node.len() != self.dim() || node.iter().zip(&self.shape).any(|(&i, &s)| i >= s) {
            return domain(format!("node {node:?} is outside the grid {:?}", self.shape));
        }
        Ok(node.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i))
    }

    pub fn node(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        unflatten(&self.shape, flat, &mut idx);
        idx
    }

    pub fn at(&self, node: &[usize]) -> Result<&Point> {
        Ok(&self.positions[self.flat(node)?])
    }

    pub fn parameters(&self, node: &[usize]) -> Vec<f64> {
        node.iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    /// Whether every stencil of half-width `margin` around `node` stays on
    /// the grid (periodic axes wrap).
    pub fn is_interior(&self, node: &[usize], margin: usize) -> bool {
        node.len() == self.dim()
            && node.iter().enumerate().all(|(a, &i)| {
                i < self.shape[a] && (self.periodic[a] || (i >= margin && i + margin < self.shape[a]))
            })
    }

    /// All nodes that are interior with the given margin, in flat order.
    pub fn interior_nodes(&self, margin: usize) -> Vec<Vec<usize>> {
        (0..self.len()).map(|f| self.node(f)).filter(|n| self.is_interior(n, margin)).collect()
    }

    /// `node` moved by `offsets` (one entry per axis), wrapping periodic axes.
    pub(crate) fn shifted(&self, node: &[usize], offsets: &[isize]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(node.len());
        for (a, (&i, &d)) in node.iter().zip(offsets).enumerate() {
            let s = self.shape[a] as isize;
            let j = i as isize + d;
            if self.periodic[a] {
                out.push(j.rem_euclid(s) as usize);
            } else if (0..s).contains(&j) {
                out.push(j as usize);
            } else {
                return None;
            }
        }
        Some(out)
    }

    fn neighbor(&self, node: &[usize], moves: &[(usize, isize)]) -> Result<&Point> {
        let mut off = vec![0isize; self.dim()];
        for &(a, d) in moves {
            off[a] += d;
        }
        let shifted = self
            .shifted(node, &off)
            .ok_or_else(|| crate::Error::Domain(format!("node {node:?} is not interior")))?;
        self.at(&shifted)
    }

    /// Central-difference tangents `x_a`.
    pub fn tangents(&self, node: &[usize]) -> Result<Vec<Point>> {
        (0..self.dim())
            .map(|a| {
                let plus = self.neighbor(node, &[(a, 1)])?;
                let minus = self.neighbor(node, &[(a, -1)])?;
                Ok(plus.sub(minus).scale(0.5 / self.spacing[a]))
            })
            .collect()
    }

    /// Central-difference second derivatives `x_ab`, symmetric in `(a, b)`.
    pub fn second_derivatives(&self, node: &[usize]) -> Result<Vec<Vec<Point>>> {
        let n = self.dim();
        let centre = self.at(node)?;
        let mut out = vec![vec![Point::zeros(n + 1); n]; n];
        for a in 0..n {
            let h = self.spacing[a];
            let plus = self.neighbor(node, &[(a, 1)])?;
            let minus = self.neighbor(node, &[(a, -1)])?;
            out[a][a] = plus.add(minus).axpy(-2.0, centre).scale(1.0 / (h * h));
            for b in a + 1..n {
                let pp = self.neighbor(node, &[(a, 1), (b, 1)])?;
                let pm = self.neighbor(node, &[(a, 1), (b, -1)])?;
                let mp = self.neighbor(node, &[(a, -1), (b, 1)])?;
                let mm = self.neighbor(node, &[(a, -1), (b, -1)])?;
                let v = pp.sub(pm).sub(mp).add(mm).scale(0.25 / (h * self.spacing[b]));
                out[a][b] = v.clone();
                out[b][a] = v;
            }
        }
        Ok(out)
    }
}

fn unflatten(shape: &[usize], mut flat: usize, idx: &mut [usize]) {
    for a in (0..shape.len()).rev() {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Patch {
        Patch::from_fn(
            vec![5, 4],
            vec![0.0, 0.0],
            vec![0.1, 0.2],
            vec![false, false],
            Orientation::Upward,
            |u| Point::from([u[0], u[1], 2.0 * u[0] - u[1]]),
        )
        .unwrap()
    }

    #[test]
    fn indexing_round_trip() {
        let p = plane();
        for f in 0..p.len() {
            assert_eq!(p.flat(&p.node(f)).unwrap(), f);
        }
        assert_eq!(p.flat(&[1, 2]).unwrap(), 6);
        assert!(p.flat(&[5, 0]).is_err());
    }

    #[test]
    fn interior_and_periodic() {
        let p = plane();
        assert!(p.is_interior(&[1, 1], 1));
        assert!(!p.is_interior(&[0, 1], 1));
        assert_eq!(p.interior_nodes(1).len(), 3 * 2);
        let ring = Patch::from_fn(
            vec![8, 3],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![true, false],
            Orientation::Parametric,
            |u| Point::from([u[0], u[1], 0.0]),
        )
        .unwrap();
        assert!(ring.is_interior(&[0, 1], 1));
        assert_eq!(ring.shifted(&[0, 1], &[-1, 0]), Some(vec![7, 1]));
    }

    #[test]
    fn affine_derivatives_are_exact() {
        let p = plane();
        let t = p.tangents(&[2, 1]).unwrap();
        assert!(t[0].distance(&Point::from([1.0, 0.0, 2.0])) < 1e-13);
        assert!(t[1].distance(&Point::from([0.0, 1.0, -1.0])) < 1e-13);
        for row in p.second_derivatives(&[2, 1]).unwrap() {
            for v in row {
                assert!(v.norm() < 1e-12);
            }
        }
        assert!(p.tangents(&[0, 1]).is_err());
    }

    #[test]
    fn rejects_bad_patches() {
        assert!(Patch::new(vec![2, 3], vec![0.0; 2], vec![1.0; 2], vec![false; 2], vec![], Orientation::Upward).is_err());
        let pts = vec![Point::zeros(2); 9];
        assert!(Patch::new(vec![3, 3], vec![0.0; 2], vec![1.0; 2], vec![false; 2], pts, Orientation::Upward).is_err());
    }
}
