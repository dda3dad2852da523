//! The algebraic condition on the Hessian at a critical point of a
//! p-minimal graph: `A^2 (Id tr A + (p - 2) A) = 0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::profile::PExponent;

const SYMMETRY_TOL: f64 = 1e-10;

/// Outcome of [`hessian_criterion`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianVerdict {
    /// Frobenius norm of `A^2 (Id tr A + (p - 2) A)`.
    pub residual: f64,
    /// Frobenius norm of `A`.
    pub norm: f64,
    /// `norm <= tol`.
    pub planar: bool,
}

impl HessianVerdict {
    /// Whether `A` satisfies the criterion at tolerance `tol`.
    pub fn admissible(&self, tol: f64) -> bool {
        self.residual <= tol
    }

    /// `residual / |A|^3`. The residual is cubic in `A`, so this is the
    /// scale-free form; zero for `A = 0`.
    pub fn relative_residual(&self) -> f64 {
        if self.norm == 0.0 {
            0.0
        } else {
            self.residual / self.norm.powi(3)
        }
    }
}

pub fn hessian_criterion(a: &DMatrix<f64>, p: PExponent, tol: f64) -> Result<HessianVerdict> {
    if !a.is_square() || a.nrows() == 0 {
        return domain("the Hessian must be a non-empty square matrix");
    }
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * (1.0 + a.amax()) {
        return domain(format!("the Hessian is not symmetric (defect {asym:e})"));
    }
    let n = a.nrows();
    let inner = DMatrix::identity(n, n) * a.trace() + a * (p.value() - 2.0);
    let residual = (a * a * inner).norm();
    let norm = a.norm();
    Ok(HessianVerdict { residual, norm, planar: norm <= tol })
}

/// The exponent forced by a diagonal Hessian with `k` equal non-zero
/// eigenvalues and the rest zero: `λ^2 (k λ + (p - 2) λ) = 0` gives `p = 2 - k`.
pub fn forced_exponent(k: usize) -> f64 {
    2.0 - k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn zero_matrix() {
        let v = hessian_criterion(&DMatrix::zeros(3, 3), p(3.0), 1e-12).unwrap();
        assert_eq!(v.residual, 0.0);
        assert!(v.planar);
    }

    #[test]
    fn saddle_passes_only_for_two() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert_eq!(hessian_criterion(&a, p(2.0), 1e-8).unwrap().residual, 0.0);
        let v = hessian_criterion(&a, p(3.0), 1e-8).unwrap();
        assert!((v.residual - 2f64.sqrt()).abs() < 1e-15);
        assert!(!v.planar);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(hessian_criterion(&a, p(3.0), 1e-8).is_err());
    }

    #[test]
    fn forced_exponent_is_not_admissible() {
        for k in 1..=4 {
            let q = forced_exponent(k);
            assert!(q <= 1.0);
            assert!(PExponent::new(q).is_err());
            let lam = 0.7;
            let mut d = vec![0.0; 4];
            for x in d.iter_mut().take(k) {
                *x = lam;
            }
            let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
            let inner = DMatrix::identity(4, 4) * a.trace() + &a * (q - 2.0);
            assert!((&a * &a * inner).norm() < 1e-15);
        }
    }
}
