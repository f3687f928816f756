//! Monte Carlo dynamically weighted importance sampling (MCDWIS).
//!
//! A population of weighted states `(θ_i, w_i)` is moved each generation by
//! R-type dynamic-weighting moves whose acceptance uses an importance-sampling
//! estimate of the unknown normalizing-constant ratio, then resized by
//! adaptive pruned-enriched population control. The posterior estimate is the
//! self-normalized weighted average over all post-burn-in populations.

mod control;
mod estimate;
mod moves;
mod target;

pub use control::{adapt_bounds, apepcs_step, sample_fate, ControlConfig, Controlled, Fate};
pub use estimate::{weighted_mean, WeightedMean};
pub use moves::{
    dynamic_weight_ratio, is_ratio_estimate, log_dynamic_weight_ratio, log_is_ratio_estimate,
    r_move, switching_parameter, MoveOutcome,
};
pub use target::{
    gaussian_batch, mh_auxiliary, sample_auxiliary, AuxiliaryBatch, DwisTarget, FeTarget,
    TwoStateTarget,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// One member of the population. Weights are stored as `ln w`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample<E> {
    pub theta: Vec<f64>,
    pub log_weight: f64,
    /// Cached unnormalized log-posterior at `theta`.
    pub log_density: f64,
    pub state: E,
}

#[derive(Debug, Clone)]
pub struct Population<E> {
    pub samples: Vec<WeightedSample<E>>,
    pub generation: usize,
    pub log_w_up: f64,
    pub log_w_low: f64,
}

impl<E> Population<E> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn default_tracked() -> Vec<usize> {
    vec![9]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McdwisConfig {
    /// Number of generations `N`.
    pub generations: usize,
    pub burn_in: usize,
    /// `ln W_c`; `φ_t = 1` while `W_up ≤ W_c`.
    pub log_w_c: f64,
    pub n_min: usize,
    pub n_low: usize,
    pub n_up: usize,
    pub n_max: usize,
    pub lambda: f64,
    /// `W_up / W_low`; defaults to `log10(W_c)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Auxiliary draws `M` per importance-sampling estimate.
    pub aux_samples: usize,
    /// Random-walk covariance is `proposal_scale · diag(σ²)` (FE targets).
    pub proposal_scale: f64,
    pub init_iterations: usize,
    pub init_burn_in: usize,
    pub init_size: usize,
    pub max_control_retries: usize,
    /// Population indices whose log-weights are traced.
    pub tracked_states: Vec<usize>,
}

impl Default for McdwisConfig {
    fn default() -> Self {
        Self {
            generations: 1000,
            burn_in: 250,
            log_w_c: 7.0,
            n_min: 100,
            n_low: 200,
            n_up: 500,
            n_max: 1000,
            lambda: 2.0,
            kappa: None,
            aux_samples: 100,
            proposal_scale: 0.1,
            init_iterations: 1000,
            init_burn_in: 200,
            init_size: 200,
            max_control_retries: 1024,
            tracked_states: default_tracked(),
        }
    }
}

impl McdwisConfig {
    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(self.log_w_c / std::f64::consts::LN_10)
    }

    pub fn control(&self) -> ControlConfig {
        ControlConfig {
            n_min: self.n_min,
            n_low: self.n_low,
            n_up: self.n_up,
            n_max: self.n_max,
            lambda: self.lambda,
            kappa: self.kappa(),
            max_retries: self.max_control_retries,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.control().validate()?;
        if self.generations == 0 || self.burn_in >= self.generations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be below generations ({})",
                self.burn_in, self.generations
            )));
        }
        if !self.log_w_c.is_finite() {
            return Err(Error::Config("log_w_c must be finite".into()));
        }
        if self.aux_samples == 0 {
            return Err(Error::Config("aux_samples must be at least 1".into()));
        }
        if !(self.proposal_scale.is_finite() && self.proposal_scale > 0.0) {
            return Err(Error::Config("proposal_scale must be positive".into()));
        }
        self.init_stride()?;
        Ok(())
    }

    /// Spacing of the states kept from the initialization chain.
    pub fn init_stride(&self) -> Result<usize> {
        let kept = self.init_iterations.saturating_sub(self.init_burn_in);
        if self.init_size == 0 || kept < self.init_size {
            return Err(Error::Config(format!(
                "cannot select {} states from {} post-burn-in iterations",
                self.init_size, kept
            )));
        }
        Ok(kept / self.init_size)
    }

    /// Chain indices (0-based) of the states selected for the first population.
    pub fn init_indices(&self) -> Result<Vec<usize>> {
        let stride = self.init_stride()?;
        Ok((0..self.init_size)
            .map(|j| self.init_burn_in + j * stride)
            .collect())
    }
}

/// Per-generation diagnostics. Every vector has one entry per generation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsTrace {
    pub population_size: Vec<usize>,
    pub log_w_up: Vec<f64>,
    pub phi: Vec<bool>,
    pub acceptance: Vec<f64>,
    pub control_sweeps: Vec<usize>,
    pub fe_failures: Vec<usize>,
    /// `ln w` of each tracked population index (`None` when the population
    /// is smaller than the index).
    pub tracked_log_weights: Vec<Vec<Option<f64>>>,
    pub tracked_states: Vec<usize>,
    /// Acceptance rate of the initialization chain.
    pub init_acceptance: f64,
}

impl DiagnosticsTrace {
    pub fn len(&self) -> usize {
        self.population_size.len()
    }

    pub fn is_empty(&self) -> bool {
        self.population_size.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct McdwisRun<E> {
    /// Weighted posterior mean of `θ`.
    pub estimate: Vec<f64>,
    pub population: Population<E>,
    pub trace: DiagnosticsTrace,
}

/// A run that stopped early, with the diagnostics gathered so far.
#[derive(Debug, thiserror::Error)]
#[error("MCDWIS aborted at generation {generation}: {error}")]
pub struct McdwisFailure {
    pub generation: usize,
    pub error: Error,
    pub trace: Box<DiagnosticsTrace>,
}

fn is_recoverable(e: &Error) -> bool {
    matches!(e, Error::Numerical { .. })
}

/// Double Metropolis-Hastings: the acceptance ratio replaces the unknown
/// `Z(θ)/Z(θ*)` with a single auxiliary draw `y ~ f(y|θ*)`:
/// `ln α = ln p(θ*) - ln p(θ) + ln p(y|θ) - ln p(y|θ*)`.
///
/// Returns the selected states (weight 1) and the chain acceptance rate.
pub fn double_mh_init<T: DwisTarget>(
    target: &T,
    start: &[f64],
    config: &McdwisConfig,
    seed: u64,
) -> Result<(Population<T::Eval>, f64)> {
    let indices = config.init_indices()?;
    let mut rng = rng::init_stream(seed);
    let mut theta = start.to_vec();
    let mut eval = target.evaluate(&theta)?;
    let mut ld = target.log_density(&eval);
    if !ld.is_finite() {
        return Err(Error::InvalidState(format!(
            "starting point has log-density {ld}"
        )));
    }
    let mut selected = Vec::with_capacity(indices.len());
    let mut next = indices.iter().peekable();
    let mut accepted = 0usize;
    for k in 0..config.init_iterations {
        let cand = target.propose(&theta, &mut rng);
        let cand_eval = match target.evaluate(&cand) {
            Ok(e) => Some(e),
            Err(e) if is_recoverable(&e) => None,
            Err(e) => return Err(e),
        };
        if let Some(ce) = cand_eval {
            let lc = target.log_density(&ce);
            if lc > f64::NEG_INFINITY {
                let y = target.draw_auxiliary(&ce, 1, &mut rng)?;
                let log_alpha = lc - ld + target.log_auxiliary(&y[0], &eval)
                    - target.log_auxiliary(&y[0], &ce)
                    + target.log_proposal_ratio(&theta, &cand);
                let u: f64 = rng.random();
                if u.ln() < log_alpha {
                    theta = cand;
                    eval = ce;
                    ld = lc;
                    accepted += 1;
                }
            }
        }
        if next.peek() == Some(&&k) {
            next.next();
            selected.push(WeightedSample {
                theta: theta.clone(),
                log_weight: 0.0,
                log_density: ld,
                state: eval.clone(),
            });
        }
    }
    let log_w_up = config.log_w_c;
    Ok((
        Population {
            samples: selected,
            generation: 0,
            log_w_up,
            log_w_low: log_w_up - config.kappa().ln(),
        },
        accepted as f64 / config.init_iterations as f64,
    ))
}

struct Moved<E> {
    sample: WeightedSample<E>,
    accepted: bool,
    fe_failure: bool,
}

fn move_sample<T: DwisTarget>(
    target: &T,
    s: &WeightedSample<T::Eval>,
    phi: bool,
    aux: usize,
    rng: &mut StreamRng,
) -> Result<Moved<T::Eval>> {
    let theta_star = target.propose(&s.theta, rng);
    let (eval_star, fe_failure) = match target.evaluate(&theta_star) {
        Ok(e) => (Some(e), false),
        Err(e) if is_recoverable(&e) => (None, true),
        Err(e) => return Err(e),
    };
    let mut log_rd = f64::NEG_INFINITY;
    let mut ld_star = f64::NEG_INFINITY;
    if let Some(e) = &eval_star {
        ld_star = target.log_density(e);
        if ld_star > f64::NEG_INFINITY {
            let batch = target.draw_auxiliary(e, aux, rng)?;
            let log_r = match log_is_ratio_estimate(
                &batch,
                |y| target.log_auxiliary(y, &s.state),
                |y| target.log_auxiliary(y, e),
            ) {
                Ok(v) => v,
                // every ratio vanished: the estimate is zero
                Err(Error::Underflow(_)) => f64::NEG_INFINITY,
                Err(err) => return Err(err),
            };
            log_rd = log_dynamic_weight_ratio(
                s.log_weight,
                log_r,
                s.log_density,
                ld_star,
                target.log_proposal_ratio(&s.theta, &theta_star),
            )?;
        }
    }
    let u: f64 = rng.random();
    let outcome = r_move(s.log_weight, log_rd, phi, u);
    let sample = match (outcome.accepted, eval_star) {
        (true, Some(e)) => WeightedSample {
            theta: theta_star,
            log_weight: outcome.log_weight,
            log_density: ld_star,
            state: e,
        },
        _ => WeightedSample {
            log_weight: outcome.log_weight,
            ..s.clone()
        },
    };
    Ok(Moved {
        sample,
        accepted: outcome.accepted,
        fe_failure,
    })
}

/// Runs the full sampler from `start`. Results depend only on `seed`, not on
/// the number of threads.
pub fn run_mcdwis<T: DwisTarget>(
    target: &T,
    start: &[f64],
    config: &McdwisConfig,
    seed: u64,
) -> std::result::Result<McdwisRun<T::Eval>, McdwisFailure> {
    let mut trace = DiagnosticsTrace {
        tracked_states: config.tracked_states.clone(),
        ..Default::default()
    };
    let fail = |generation: usize, error: Error, trace: &DiagnosticsTrace| McdwisFailure {
        generation,
        error,
        trace: Box::new(trace.clone()),
    };
    if let Err(e) = config.validate() {
        return Err(fail(0, e, &trace));
    }
    if start.len() != target.dim() {
        return Err(fail(0, Error::shape("start point", target.dim(), start.len()), &trace));
    }
    let control = config.control();
    let (mut pop, init_acceptance) =
        double_mh_init(target, start, config, seed).map_err(|e| fail(0, e, &trace))?;
    trace.init_acceptance = init_acceptance;
    let mut mean = WeightedMean::new(target.dim());

    for t in 1..=config.generations {
        let (log_w_up, _) = adapt_bounds(pop.len(), pop.log_w_up, &control);
        let phi = switching_parameter(pop.log_w_up, config.log_w_c);
        let moved: Result<Vec<Moved<T::Eval>>> = pop
            .samples
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let mut r = rng::sample_stream(seed, t, i);
                move_sample(target, s, phi, config.aux_samples, &mut r)
            })
            .collect();
        let moved = moved.map_err(|e| fail(t, e, &trace))?;
        let failures = moved.iter().filter(|m| m.fe_failure).count();
        if failures * 2 > moved.len() {
            return Err(fail(
                t,
                Error::Numerical {
                    message: format!("{failures} of {} FE solves failed", moved.len()),
                    iterations: 0,
                },
                &trace,
            ));
        }
        let accepted = moved.iter().filter(|m| m.accepted).count();
        let n_moved = moved.len();
        let samples: Vec<_> = moved.into_iter().map(|m| m.sample).collect();
        let mut crng = rng::control_stream(seed, t);
        let controlled = apepcs_step(&samples, log_w_up, &control, t, &mut crng)
            .map_err(|e| fail(t, e, &trace))?;
        pop = Population {
            samples: controlled.samples,
            generation: t,
            log_w_up: controlled.log_w_up,
            log_w_low: controlled.log_w_low,
        };

        trace.population_size.push(pop.len());
        trace.log_w_up.push(pop.log_w_up);
        trace.phi.push(phi);
        trace.acceptance.push(accepted as f64 / n_moved as f64);
        trace.control_sweeps.push(controlled.sweep_sizes.len());
        trace.fe_failures.push(failures);
        trace.tracked_log_weights.push(
            config
                .tracked_states
                .iter()
                .map(|&i| pop.samples.get(i).map(|s| s.log_weight))
                .collect(),
        );

        if t > config.burn_in {
            for s in &pop.samples {
                mean.add(s.log_weight, &s.theta);
            }
        }
    }
    let estimate = mean.mean().map_err(|e| fail(config.generations, e, &trace))?;
    Ok(McdwisRun {
        estimate,
        population: pop,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_settings() {
        let c = McdwisConfig::default();
        c.validate().unwrap();
        assert!((c.kappa() - 3.0401).abs() < 1e-4);
        let idx = c.init_indices().unwrap();
        assert_eq!(idx.len(), 200);
        assert_eq!(idx[0], 200);
        assert_eq!(idx[1], 204);
        assert_eq!(*idx.last().unwrap(), 996);
    }

    #[test]
    fn config_validation() {
        let bad = McdwisConfig {
            burn_in: 1000,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = McdwisConfig {
            n_low: 600,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = McdwisConfig {
            aux_samples: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = McdwisConfig {
            kappa: Some(1.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn toy() -> TwoStateTarget {
        TwoStateTarget {
            scales: [1.0, 1.3],
            prior: [0.5, 0.5],
            observed: 0.5,
        }
    }

    fn small_config() -> McdwisConfig {
        McdwisConfig {
            generations: 60,
            burn_in: 20,
            n_min: 20,
            n_low: 40,
            n_up: 100,
            n_max: 200,
            aux_samples: 20,
            init_iterations: 200,
            init_burn_in: 40,
            init_size: 40,
            ..Default::default()
        }
    }

    #[test]
    fn toy_run_is_deterministic_and_respects_bounds() {
        let cfg = small_config();
        let a = run_mcdwis(&toy(), &[0.0], &cfg, 17).unwrap();
        let b = run_mcdwis(&toy(), &[0.0], &cfg, 17).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.trace.len(), cfg.generations);
        assert_eq!(a.trace.tracked_log_weights.len(), cfg.generations);
        for &n in &a.trace.population_size {
            assert!((cfg.n_min..=cfg.n_max).contains(&n));
        }
        for s in &a.population.samples {
            assert!(s.log_weight >= a.population.log_w_low);
            assert!(s.log_weight <= a.population.log_w_up);
        }
        let c = run_mcdwis(&toy(), &[0.0], &cfg, 18).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn invalid_start_aborts_with_trace() {
        let err = run_mcdwis(&toy(), &[0.5], &small_config(), 1).unwrap_err();
        assert_eq!(err.generation, 0);
        assert!(matches!(err.error, Error::InvalidState(_)));
        assert!(err.trace.is_empty());
    }

    #[test]
    fn init_population_has_unit_weights() {
        let cfg = McdwisConfig::default();
        let (pop, rate) = double_mh_init(&toy(), &[1.0], &cfg, 3).unwrap();
        assert_eq!(pop.len(), 200);
        assert!(pop.samples.iter().all(|s| s.log_weight == 0.0));
        assert!(pop.samples.iter().all(|s| s.theta[0] == 0.0 || s.theta[0] == 1.0));
        assert!(rate > 0.0 && rate <= 1.0);
    }
}
