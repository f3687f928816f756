//! Adaptive Metropolis-Hastings baseline.
//!
//! Random-walk Metropolis whose Gaussian proposal covariance, from the
//! adaptation start on, is `(2.38²/d)·Cov(θ_1..θ_k) + ε·I`. The chain runs
//! in coordinates standardized by the initial proposal's diagonal, so `ε`
//! is relative to each parameter's own scale.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bayes::Posterior;
use crate::error::{Error, Result};
use crate::rng;

/// Anything with an unnormalized log-density over `R^d`.
pub trait LogDensity {
    fn dim(&self) -> usize;
    /// `-inf` outside the support.
    fn log_density(&self, theta: &[f64]) -> Result<f64>;
}

impl LogDensity for Posterior {
    fn dim(&self) -> usize {
        Posterior::dim(self)
    }

    fn log_density(&self, theta: &[f64]) -> Result<f64> {
        Posterior::log_density(self, theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmhConfig {
    pub iterations: usize,
    pub burn_in: usize,
    /// Initial proposal covariance is `initial_scale · diag(σ²)`.
    pub initial_scale: f64,
    /// First iteration using the adapted covariance; defaults to `burn_in/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptation_start: Option<usize>,
    /// Regularization added to the standardized empirical covariance.
    pub epsilon: f64,
    /// Length of the window checked for all-rejection warnings.
    pub warn_window: usize,
}

impl Default for AmhConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            burn_in: 250,
            initial_scale: 0.1,
            adaptation_start: None,
            epsilon: 1e-6,
            warn_window: 100,
        }
    }
}

impl AmhConfig {
    pub fn adaptation_start(&self) -> usize {
        self.adaptation_start.unwrap_or(self.burn_in / 2).max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.initial_scale.is_finite() && self.initial_scale > 0.0) {
            return Err(Error::Config("initial_scale must be positive".into()));
        }
        if matches!(self.adaptation_start, Some(s) if s < 2) {
            return Err(Error::Config("adaptation_start must be at least 2".into()));
        }
        if self.warn_window == 0 {
            return Err(Error::Config("warn_window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub iteration: usize,
    pub theta: Vec<f64>,
    pub log_density: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct AmhRun {
    /// Post-burn-in mean of the chain.
    pub mean: Vec<f64>,
    pub chain: Vec<ChainState>,
    /// Running acceptance rate after each iteration.
    pub acceptance: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Running mean and scatter matrix (Welford).
struct Moments {
    n: usize,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
}

impl Moments {
    fn new(d: usize) -> Self {
        Self {
            n: 0,
            mean: DVector::zeros(d),
            scatter: DMatrix::zeros(d, d),
        }
    }

    fn push(&mut self, x: &DVector<f64>) {
        self.n += 1;
        let delta = x - &self.mean;
        self.mean += &delta / self.n as f64;
        let delta2 = x - &self.mean;
        self.scatter += &delta * delta2.transpose();
    }

    fn covariance(&self) -> DMatrix<f64> {
        let c = &self.scatter / (self.n.max(2) - 1) as f64;
        (&c + c.transpose()) * 0.5
    }
}

/// Runs the adaptive chain from `start`. `initial_covariance` must be
/// symmetric positive definite; its diagonal also sets the standardization.
pub fn run_amh<T: LogDensity + ?Sized>(
    target: &T,
    start: &[f64],
    initial_covariance: &DMatrix<f64>,
    config: &AmhConfig,
    seed: u64,
) -> Result<AmhRun> {
    config.validate()?;
    let d = target.dim();
    if start.len() != d {
        return Err(Error::shape("start point", d, start.len()));
    }
    if initial_covariance.nrows() != d || initial_covariance.ncols() != d {
        return Err(Error::shape("initial proposal covariance", d, initial_covariance.nrows()));
    }
    let scale: Vec<f64> = (0..d).map(|i| initial_covariance[(i, i)].sqrt()).collect();
    if scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Covariance(
            "initial proposal covariance must have a positive diagonal".into(),
        ));
    }
    let origin = start.to_vec();
    let to_theta = |z: &DVector<f64>| -> Vec<f64> {
        (0..d).map(|i| origin[i] + scale[i] * z[i]).collect()
    };
    let standardized =
        DMatrix::from_fn(d, d, |i, j| initial_covariance[(i, j)] / (scale[i] * scale[j]));
    let initial_chol = standardized
        .cholesky()
        .ok_or_else(|| Error::Covariance("initial proposal covariance is not SPD".into()))?
        .l();

    let mut rng = rng::init_stream(seed);
    let mut z = DVector::zeros(d);
    let mut lp = target.log_density(start)?;
    if !lp.is_finite() {
        return Err(Error::InvalidState(format!(
            "starting point has log-density {lp}"
        )));
    }
    let adapt_start = config.adaptation_start();
    let factor = 2.38f64.powi(2) / d as f64;
    let mut moments = Moments::new(d);
    moments.push(&z);

    let mut chain = Vec::with_capacity(config.iterations);
    let mut acceptance = Vec::with_capacity(config.iterations);
    let mut warnings = Vec::new();
    let mut accepted_total = 0usize;
    let mut window_accepts = 0usize;

    for k in 0..config.iterations {
        let l = if k >= adapt_start {
            let c = moments.covariance() * factor + DMatrix::identity(d, d) * config.epsilon;
            c.cholesky()
                .ok_or_else(|| Error::Covariance(format!("adapted proposal lost SPD at iteration {k}")))?
                .l()
        } else {
            initial_chol.clone()
        };
        let e = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let cand = &z + l * e;
        let cand_theta = to_theta(&cand);
        let lc = target.log_density(&cand_theta)?;
        let u: f64 = rng.random();
        let accepted = lc > f64::NEG_INFINITY && u.ln() < lc - lp;
        if accepted {
            z = cand;
            lp = lc;
            accepted_total += 1;
            window_accepts += 1;
        }
        moments.push(&z);
        chain.push(ChainState {
            iteration: k + 1,
            theta: to_theta(&z),
            log_density: lp,
            accepted,
        });
        acceptance.push(accepted_total as f64 / (k + 1) as f64);
        if (k + 1) % config.warn_window == 0 {
            if window_accepts == 0 {
                warnings.push(format!(
                    "no proposals accepted in iterations {}..={}",
                    k + 2 - config.warn_window,
                    k + 1
                ));
            }
            window_accepts = 0;
        }
    }

    let kept = &chain[config.burn_in..];
    let mean: Vec<f64> = (0..d)
        .map(|i| kept.iter().map(|s| s.theta[i]).sum::<f64>() / kept.len() as f64)
        .collect();
    Ok(AmhRun {
        mean,
        chain,
        acceptance,
        warnings,
    })
}
