//! Gaussian likelihood, Gaussian prior and the unnormalized posterior.

mod data;
mod posterior;

pub use data::{MeasuredData, MeasuredDataFile, DEFAULT_RELATIVE_NOISE};
pub use posterior::{Posterior, PosteriorPoint};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::GaussianForm;

/// Log of the Gaussian frequency likelihood
/// `-(N/2)ln2π - ½ln|Σ_f| - ½ rᵀΣ_f⁻¹r` with `r = f^c - f^m`.
pub fn log_likelihood(computed: &[f64], data: &MeasuredData) -> Result<f64> {
    let n = data.len();
    if computed.len() != n {
        return Err(Error::shape("computed frequencies", n, computed.len()));
    }
    let residual: Vec<f64> = computed
        .iter()
        .zip(data.frequencies())
        .map(|(c, m)| c - m)
        .collect();
    Ok(data.form().log_density(&residual))
}

#[derive(Debug, Clone)]
pub struct GaussianPrior {
    mean: Vec<f64>,
    covariance: DMatrix<f64>,
    form: GaussianForm,
}

impl GaussianPrior {
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if covariance.nrows() != mean.len() || covariance.ncols() != mean.len() {
            return Err(Error::shape("prior covariance", mean.len(), covariance.nrows()));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::Config("prior mean must be finite".into()));
        }
        let form = GaussianForm::new(&covariance)?;
        Ok(Self {
            mean,
            covariance,
            form,
        })
    }

    /// Independent components with standard deviations `std`.
    pub fn diagonal(mean: Vec<f64>, std: &[f64]) -> Result<Self> {
        if std.len() != mean.len() {
            return Err(Error::shape("prior standard deviations", mean.len(), std.len()));
        }
        let cov = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            std.len(),
            std.iter().map(|s| s * s),
        ));
        Self::new(mean, cov)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Log of the Gaussian prior density at `theta`.
pub fn log_prior(theta: &[f64], prior: &GaussianPrior) -> Result<f64> {
    if theta.len() != prior.dim() {
        return Err(Error::shape("updating vector", prior.dim(), theta.len()));
    }
    let dev: Vec<f64> = theta.iter().zip(&prior.mean).map(|(t, m)| t - m).collect();
    Ok(prior.form.log_density(&dev))
}
