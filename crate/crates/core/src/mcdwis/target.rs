//! Targets the sampler can run on.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bayes::{Posterior, PosteriorPoint};
use crate::error::{Error, Result};
use crate::math::GaussianForm;
use crate::rng::StreamRng;

/// A posterior `p(θ|D) ∝ p(D,θ)π(θ)` whose likelihood is the density of an
/// auxiliary observation `y` with a normalizing constant `Z(θ)` the sampler
/// never evaluates.
pub trait DwisTarget: Sync {
    /// Whatever the target caches per state (e.g. computed frequencies).
    type Eval: Clone + Send + Sync;

    fn dim(&self) -> usize;

    fn evaluate(&self, theta: &[f64]) -> Result<Self::Eval>;

    /// Unnormalized log-posterior; `-inf` outside the support.
    fn log_density(&self, eval: &Self::Eval) -> f64;

    fn propose(&self, theta: &[f64], rng: &mut StreamRng) -> Vec<f64>;

    /// `ln π(θ|θ*) - ln π(θ*|θ)`; zero for symmetric proposals.
    fn log_proposal_ratio(&self, _theta: &[f64], _theta_star: &[f64]) -> f64 {
        0.0
    }

    /// `m` draws from `f(y|θ*)`.
    fn draw_auxiliary(
        &self,
        eval_star: &Self::Eval,
        m: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<Vec<f64>>>;

    /// Unnormalized `ln p(y|θ)`.
    fn log_auxiliary(&self, y: &[f64], eval: &Self::Eval) -> f64;
}

/// `M` simulated frequency vectors drawn at `θ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryBatch {
    pub source: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

/// Exact draws `y_j = mean + L z_j` from `N(mean, Σ)`.
pub fn gaussian_batch<R: Rng + ?Sized>(
    mean: &[f64],
    form: &GaussianForm,
    m: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let n = mean.len();
    let mut z = vec![0.0; n];
    (0..m)
        .map(|_| {
            z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            form.correlate(&z)
                .into_iter()
                .zip(mean)
                .map(|(e, mu)| mu + e)
                .collect()
        })
        .collect()
}

/// `M` auxiliary frequency draws at `θ*` from the Gaussian measurement model.
pub fn sample_auxiliary<R: Rng + ?Sized>(
    posterior: &Posterior,
    theta_star: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<AuxiliaryBatch> {
    if !posterior.space().contains(theta_star) {
        return Err(Error::InvalidState("auxiliary source is out of bounds".into()));
    }
    let fc = posterior.frequencies(theta_star)?;
    let form = GaussianForm::new(posterior.data().covariance())?;
    Ok(AuxiliaryBatch {
        source: theta_star.to_vec(),
        y: gaussian_batch(&fc, &form, m, rng),
    })
}

/// Draws from an unnormalized density with a random-walk Metropolis chain:
/// `burn` discarded steps, then one retained state every `thin` steps.
/// Useful when `f(y|θ)` cannot be sampled exactly.
pub fn mh_auxiliary<F, R>(
    log_p: F,
    start: &[f64],
    step: &[f64],
    m: usize,
    burn: usize,
    thin: usize,
    rng: &mut R,
) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let mut y = start.to_vec();
    let mut lp = log_p(&y);
    let mut out = Vec::with_capacity(m);
    let thin = thin.max(1);
    let total = burn + m * thin;
    for k in 1..=total {
        let cand: Vec<f64> = y
            .iter()
            .zip(step)
            .map(|(v, s)| v + s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let lc = log_p(&cand);
        let u: f64 = rng.random();
        if lc > f64::NEG_INFINITY && u.ln() < lc - lp {
            y = cand;
            lp = lc;
        }
        if k > burn && (k - burn).is_multiple_of(thin) {
            out.push(y.clone());
        }
    }
    out
}

/// The FE posterior as a sampling target. The proposal is a Gaussian random
/// walk with a fixed covariance.
#[derive(Debug, Clone)]
pub struct FeTarget {
    posterior: Posterior,
    proposal: GaussianForm,
    noise: GaussianForm,
}

impl FeTarget {
    pub fn new(posterior: Posterior, proposal_covariance: &DMatrix<f64>) -> Result<Self> {
        let d = posterior.dim();
        if proposal_covariance.nrows() != d {
            return Err(Error::shape("proposal covariance", d, proposal_covariance.nrows()));
        }
        let proposal = GaussianForm::new(proposal_covariance)?;
        let noise = GaussianForm::new(posterior.data().covariance())?;
        Ok(Self {
            posterior,
            proposal,
            noise,
        })
    }

    /// Proposal covariance `scale · diag(σ²)`.
    pub fn diagonal_proposal(std: &[f64], scale: f64) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            std.len(),
            std.iter().map(|s| scale * s * s),
        ))
    }

    pub fn posterior(&self) -> &Posterior {
        &self.posterior
    }
}

impl DwisTarget for FeTarget {
    type Eval = PosteriorPoint;

    fn dim(&self) -> usize {
        self.posterior.dim()
    }

    fn evaluate(&self, theta: &[f64]) -> Result<PosteriorPoint> {
        self.posterior.evaluate(theta)
    }

    fn log_density(&self, eval: &PosteriorPoint) -> f64 {
        eval.log_posterior
    }

    fn propose(&self, theta: &[f64], rng: &mut StreamRng) -> Vec<f64> {
        let z: Vec<f64> = (0..theta.len()).map(|_| rng.sample(StandardNormal)).collect();
        self.proposal
            .correlate(&z)
            .into_iter()
            .zip(theta)
            .map(|(e, t)| t + e)
            .collect()
    }

    fn draw_auxiliary(
        &self,
        eval_star: &PosteriorPoint,
        m: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<Vec<f64>>> {
        let fc = eval_star
            .frequencies
            .as_ref()
            .ok_or_else(|| Error::InvalidState("auxiliary draw outside the support".into()))?;
        Ok(gaussian_batch(fc, &self.noise, m, rng))
    }

    fn log_auxiliary(&self, y: &[f64], eval: &PosteriorPoint) -> f64 {
        match &eval.frequencies {
            Some(fc) => {
                let r: Vec<f64> = y.iter().zip(fc).map(|(a, b)| a - b).collect();
                -0.5 * self.noise.mahalanobis_sq(&r)
            }
            None => f64::NEG_INFINITY,
        }
    }
}

/// Two-state toy target with known normalizers, used to check that the
/// weighted estimator is correct.
///
/// State `k ∈ {0, 1}` is stored as `θ = [k]`. The auxiliary density is
/// `p(y|k) = exp(-y²/(2 s_k²))` with `Z(k) = √(2π)·s_k`, the prior is
/// `π(k)` and the observation is `y_obs`. Proposals always flip the state.
#[derive(Debug, Clone)]
pub struct TwoStateTarget {
    pub scales: [f64; 2],
    pub prior: [f64; 2],
    pub observed: f64,
}

impl TwoStateTarget {
    fn state(theta: &[f64]) -> Option<usize> {
        match theta.first() {
            Some(&0.0) => Some(0),
            Some(&1.0) => Some(1),
            _ => None,
        }
    }

    /// Exact `P(k = 1 | y_obs)` by enumeration.
    pub fn probability_of_one(&self) -> f64 {
        let mass = |k: usize| {
            let s = self.scales[k];
            self.prior[k] * (-self.observed * self.observed / (2.0 * s * s)).exp()
                / ((2.0 * std::f64::consts::PI).sqrt() * s)
        };
        mass(1) / (mass(0) + mass(1))
    }
}

impl DwisTarget for TwoStateTarget {
    type Eval = Option<usize>;

    fn dim(&self) -> usize {
        1
    }

    fn evaluate(&self, theta: &[f64]) -> Result<Option<usize>> {
        Ok(Self::state(theta))
    }

    fn log_density(&self, eval: &Option<usize>) -> f64 {
        match *eval {
            Some(k) => {
                let s = self.scales[k];
                self.prior[k].ln() - self.observed * self.observed / (2.0 * s * s)
            }
            None => f64::NEG_INFINITY,
        }
    }

    fn propose(&self, theta: &[f64], _rng: &mut StreamRng) -> Vec<f64> {
        vec![1.0 - theta[0]]
    }

    fn draw_auxiliary(
        &self,
        eval_star: &Option<usize>,
        m: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<Vec<f64>>> {
        let k = eval_star.ok_or_else(|| Error::InvalidState("not a toy state".into()))?;
        let s = self.scales[k];
        Ok((0..m)
            .map(|_| vec![s * rng.sample::<f64, _>(StandardNormal)])
            .collect())
    }

    fn log_auxiliary(&self, y: &[f64], eval: &Option<usize>) -> f64 {
        match *eval {
            Some(k) => -y[0] * y[0] / (2.0 * self.scales[k] * self.scales[k]),
            None => f64::NEG_INFINITY,
        }
    }
}
