//! Adaptive pruned-enriched population control.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::WeightedSample;
use crate::error::{Error, Result};

/// Size band and weight-bound adaptation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub n_min: usize,
    pub n_low: usize,
    pub n_up: usize,
    pub n_max: usize,
    /// Multiplicative step for `W_up` when the size leaves `[n_low, n_up]`.
    pub lambda: f64,
    /// `W_up / W_low`.
    pub kappa: f64,
    /// Re-sweeps allowed per generation to reach `[n_min, n_max]`.
    pub max_retries: usize,
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n_min >= 1
            && self.n_min <= self.n_low
            && self.n_low < self.n_up
            && self.n_up <= self.n_max;
        if !ok {
            return Err(Error::Config(format!(
                "population bounds must satisfy 1 <= n_min <= n_low < n_up <= n_max, got {} {} {} {}",
                self.n_min, self.n_low, self.n_up, self.n_max
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 1.0) {
            return Err(Error::Config(format!("kappa must exceed 1, got {}", self.kappa)));
        }
        if !(self.lambda.is_finite() && self.lambda > 1.0) {
            return Err(Error::Config(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        if self.max_retries == 0 {
            return Err(Error::Config("max_retries must be at least 1".into()));
        }
        Ok(())
    }

    pub fn log_kappa(&self) -> f64 {
        self.kappa.ln()
    }
}

/// Moves `W_up` by a factor `λ` when `size` leaves `[n_low, n_up]` and
/// returns `(ln W_up', ln W_low')` with `W_low' = W_up'/κ`.
pub fn adapt_bounds(size: usize, log_w_up: f64, config: &ControlConfig) -> (f64, f64) {
    let step = config.lambda.ln();
    let up = if size > config.n_up {
        log_w_up + step
    } else if size < config.n_low {
        log_w_up - step
    } else {
        log_w_up
    };
    (up, up - config.log_kappa())
}

/// What one sweep does to one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fate {
    Keep,
    /// `copies` samples, each with log-weight `log_weight`.
    Split { copies: usize, log_weight: f64 },
    Drop,
}

/// Decides the fate of one sample of log-weight `lw` under `[low, up]`.
///
/// Enrichment splits `w > W_up` into `⌈w/W_up⌉` equal pieces. Pruning keeps
/// `w < W_low` with probability `w/W_low` and lifts it to `W_low`. Pieces
/// that land below `W_low` (possible only when `κ < 2`) are pruned too.
/// `cap` bounds the copies worth resolving; anything above it is reported
/// as `cap + 1`.
pub fn sample_fate<R: Rng + ?Sized>(lw: f64, up: f64, low: f64, cap: usize, rng: &mut R) -> Fate {
    if lw > up {
        let ratio = (lw - up).exp();
        let d = ratio.ceil();
        if d > cap as f64 {
            return Fate::Split {
                copies: cap + 1,
                log_weight: up,
            };
        }
        let d = d as usize;
        let piece = (lw - (d as f64).ln()).min(up);
        if piece >= low {
            return Fate::Split {
                copies: d,
                log_weight: piece,
            };
        }
        let q = (piece - low).exp();
        let survivors = (0..d).filter(|_| rng.random::<f64>() < q).count();
        return match survivors {
            0 => Fate::Drop,
            n => Fate::Split {
                copies: n,
                log_weight: low,
            },
        };
    }
    if lw < low {
        let q = (lw - low).exp();
        return if rng.random::<f64>() < q {
            Fate::Split {
                copies: 1,
                log_weight: low,
            }
        } else {
            Fate::Drop
        };
    }
    Fate::Keep
}

/// Result of controlling one population.
#[derive(Debug, Clone)]
pub struct Controlled<E> {
    pub samples: Vec<WeightedSample<E>>,
    pub log_w_up: f64,
    pub log_w_low: f64,
    /// Size after each sweep, the last one accepted.
    pub sweep_sizes: Vec<usize>,
}

/// One pass of population control with a given `ln W_up`, followed by
/// re-sweeps of the *input* population with adapted bounds until the size
/// falls within `[n_min, n_max]`.
pub fn apepcs_step<E: Clone, R: Rng + ?Sized>(
    input: &[WeightedSample<E>],
    log_w_up: f64,
    config: &ControlConfig,
    generation: usize,
    rng: &mut R,
) -> Result<Controlled<E>> {
    if input.is_empty() {
        return Err(Error::InvalidState(format!(
            "empty population entering control at generation {generation}"
        )));
    }
    if let Some(s) = input.iter().find(|s| !s.log_weight.is_finite()) {
        return Err(Error::InvalidState(format!(
            "non-finite log-weight {} at generation {generation}",
            s.log_weight
        )));
    }
    let step = config.lambda.ln();
    let log_kappa = config.log_kappa();
    let mut up = log_w_up;
    let mut sizes = Vec::new();
    let mut fates = Vec::with_capacity(input.len());

    for _ in 0..config.max_retries {
        let low = up - log_kappa;
        fates.clear();
        let mut size = 0usize;
        for s in input {
            let fate = sample_fate(s.log_weight, up, low, config.n_max, rng);
            size += match fate {
                Fate::Keep => 1,
                Fate::Split { copies, .. } => copies,
                Fate::Drop => 0,
            };
            fates.push(fate);
            if size > config.n_max {
                break;
            }
        }
        sizes.push(size);
        if size > config.n_max {
            up += step;
            continue;
        }
        if size < config.n_min {
            up -= step;
            continue;
        }
        let mut samples = Vec::with_capacity(size);
        for (s, fate) in input.iter().zip(&fates) {
            match *fate {
                Fate::Keep => samples.push(s.clone()),
                Fate::Split { copies, log_weight } => {
                    for _ in 0..copies {
                        let mut c = s.clone();
                        c.log_weight = log_weight;
                        samples.push(c);
                    }
                }
                Fate::Drop => {}
            }
        }
        return Ok(Controlled {
            samples,
            log_w_up: up,
            log_w_low: low,
            sweep_sizes: sizes,
        });
    }
    Err(Error::ControlFailure {
        generation,
        attempts: config.max_retries,
        sizes,
    })
}
