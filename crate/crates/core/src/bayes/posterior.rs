use std::sync::Arc;

use super::{log_likelihood, log_prior, GaussianPrior, MeasuredData};
use crate::error::{Error, Result};
use crate::fem::{BeamModel, FrequencySolver};
use crate::params::ParameterSpace;

/// Everything computed for one candidate `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPoint {
    pub theta: Vec<f64>,
    /// `None` when `θ` is outside the bounds and no FE solve was done.
    pub frequencies: Option<Vec<f64>>,
    pub log_likelihood: f64,
    pub log_prior: f64,
    pub log_posterior: f64,
}

impl PosteriorPoint {
    fn outside(theta: Vec<f64>) -> Self {
        Self {
            theta,
            frequencies: None,
            log_likelihood: f64::NEG_INFINITY,
            log_prior: f64::NEG_INFINITY,
            log_posterior: f64::NEG_INFINITY,
        }
    }

    pub fn in_support(&self) -> bool {
        self.log_posterior > f64::NEG_INFINITY
    }
}

/// Unnormalized log-posterior `ln p(f^m|θ) + ln p(θ)` for an FE model.
#[derive(Debug, Clone)]
pub struct Posterior {
    solver: Arc<FrequencySolver>,
    space: Arc<ParameterSpace>,
    data: MeasuredData,
    prior: GaussianPrior,
}

impl Posterior {
    pub fn new(model: BeamModel, data: MeasuredData, prior: GaussianPrior) -> Result<Self> {
        let d = model.parameter_space().dim();
        if prior.dim() != d {
            return Err(Error::shape("prior mean", d, prior.dim()));
        }
        let space = Arc::new(model.parameter_space().clone());
        let solver = Arc::new(FrequencySolver::new(model));
        // fail early if the model cannot supply enough elastic modes
        solver.elastic_frequencies(solver.model().nominal(), data.len())?;
        Ok(Self {
            solver,
            space,
            data,
            prior,
        })
    }

    pub fn space(&self) -> &Arc<ParameterSpace> {
        &self.space
    }

    pub fn data(&self) -> &MeasuredData {
        &self.data
    }

    pub fn prior(&self) -> &GaussianPrior {
        &self.prior
    }

    pub fn model(&self) -> &BeamModel {
        self.solver.model()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// First `N_m` elastic frequencies at `θ`.
    pub fn frequencies(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.solver.elastic_frequencies(theta, self.data.len())
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<PosteriorPoint> {
        if theta.len() != self.dim() {
            return Err(Error::shape("updating vector", self.dim(), theta.len()));
        }
        if !self.space.contains(theta) {
            return Ok(PosteriorPoint::outside(theta.to_vec()));
        }
        let freqs = self.frequencies(theta)?;
        let ll = log_likelihood(&freqs, &self.data)?;
        let lp = log_prior(theta, &self.prior)?;
        Ok(PosteriorPoint {
            theta: theta.to_vec(),
            frequencies: Some(freqs),
            log_likelihood: ll,
            log_prior: lp,
            log_posterior: ll + lp,
        })
    }

    pub fn log_density(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.evaluate(theta)?.log_posterior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::bundled;
    use rand::{Rng, SeedableRng};

    fn cantilever_posterior(c: f64) -> Posterior {
        let model = bundled::cantilever(10);
        let solver = FrequencySolver::new(model.clone());
        let mut theta = model.nominal().to_vec();
        theta[2] *= 1.2;
        let f = solver.elastic_frequencies(&theta, 4).unwrap();
        let data = MeasuredData::with_relative_noise(f, c).unwrap();
        let std: Vec<f64> = model.nominal().iter().map(|x| 0.2 * x).collect();
        let prior = GaussianPrior::diagonal(model.nominal().to_vec(), &std).unwrap();
        Posterior::new(model, data, prior).unwrap()
    }

    #[test]
    fn outside_bounds_is_minus_infinity() {
        let post = cantilever_posterior(0.01);
        let mut theta = post.model().nominal().to_vec();
        theta[0] = post.space().upper[0] * 1.01;
        let p = post.evaluate(&theta).unwrap();
        assert_eq!(p.log_posterior, f64::NEG_INFINITY);
        assert!(p.frequencies.is_none());
        assert!(!p.in_support());
    }

    #[test]
    fn data_generating_point_beats_perturbations() {
        let post = cantilever_posterior(0.01);
        let mut truth = post.model().nominal().to_vec();
        truth[2] *= 1.2;
        let best = post.evaluate(&truth).unwrap().log_likelihood;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut t = truth.clone();
            let k = rng.random_range(0..t.len());
            let sign = if rng.random::<bool>() { 1.1 } else { 0.9 };
            t[k] *= sign;
            if !post.space().contains(&t) {
                continue;
            }
            assert!(post.evaluate(&t).unwrap().log_likelihood < best);
        }
    }

    #[test]
    fn shape_errors() {
        let post = cantilever_posterior(0.01);
        assert!(post.evaluate(&[1.0]).is_err());
    }
}
