//! Small numerical helpers shared by the samplers.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln(Σ exp(x_i))` without overflow. Returns `-inf` for an empty input or
/// when every term is `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// A multivariate normal density with a cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianForm {
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl GaussianForm {
    pub fn new(covariance: &DMatrix<f64>) -> Result<Self> {
        if !covariance.is_square() {
            return Err(Error::Covariance(format!(
                "covariance must be square, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::Covariance("covariance has non-finite entries".into()));
        }
        if covariance != &covariance.transpose() {
            return Err(Error::Covariance("covariance is not symmetric".into()));
        }
        let chol = covariance
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Covariance("covariance is not positive definite".into()))?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return Err(Error::Covariance("covariance determinant is not finite".into()));
        }
        Ok(Self { chol, log_det })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn lower(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `rᵀ Σ⁻¹ r`.
    pub fn mahalanobis_sq(&self, residual: &[f64]) -> f64 {
        let r = DVector::from_column_slice(residual);
        let z = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&r)
            .expect("cholesky factor has a positive diagonal");
        z.norm_squared()
    }

    /// Full log-density of a residual, normalizing constant included.
    pub fn log_density(&self, residual: &[f64]) -> f64 {
        let n = residual.len() as f64;
        -0.5 * n * LN_2PI - 0.5 * self.log_det - 0.5 * self.mahalanobis_sq(residual)
    }

    /// `L z` for a standard-normal vector `z`, i.e. a draw from `N(0, Σ)`.
    pub fn correlate(&self, z: &[f64]) -> Vec<f64> {
        let l = self.chol.l_dirty();
        let n = z.len();
        (0..n)
            .map(|i| (0..=i).map(|j| l[(i, j)] * z[j]).sum())
            .collect()
    }
}

pub fn frequency_from_eigenvalue(lambda: f64) -> f64 {
    lambda.max(0.0).sqrt() / (2.0 * PI)
}

pub fn eigenvalue_from_frequency(hz: f64) -> f64 {
    let w = 2.0 * PI * hz;
    w * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs = [0.1, -2.0, 3.5];
        let direct: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_add_exp_handles_neg_infinity() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_2pi_constant() {
        assert!((LN_2PI - (2.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(GaussianForm::new(&c), Err(Error::Covariance(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianForm::new(&asym).is_err());
    }
}
