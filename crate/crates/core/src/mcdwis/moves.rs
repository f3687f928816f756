//! The dynamic-weighting transition: importance-sampling estimate of the
//! normalizing-constant ratio, the dynamic weighting ratio and the R-type
//! move. Everything is carried in log space.

use crate::error::{Error, Result};
use crate::math::{log_add_exp, log_sum_exp};

/// `ln R̂` where `R̂ = (1/M) Σ_j p(y_j|θ_t) / p(y_j|θ*)` estimates
/// `Z(θ_t)/Z(θ*)` from draws `y_j ~ f(y|θ*)`.
///
/// `log_p_t` and `log_p_star` are the unnormalized auxiliary log-densities
/// at `θ_t` and `θ*`.
pub fn log_is_ratio_estimate<F, G>(batch: &[Vec<f64>], log_p_t: F, log_p_star: G) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    if batch.is_empty() {
        return Err(Error::Config("auxiliary batch is empty".into()));
    }
    let terms: Vec<f64> = batch
        .iter()
        .map(|y| {
            let (a, b) = (log_p_t(y), log_p_star(y));
            if a == b {
                // exact cancellation, also covers both being -inf
                0.0
            } else {
                a - b
            }
        })
        .collect();
    let lse = log_sum_exp(&terms);
    if lse == f64::NEG_INFINITY || lse.is_nan() {
        let finite = terms.iter().filter(|t| t.is_finite()).count();
        let largest = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::Underflow(format!(
            "all {} log-ratios vanish ({finite} finite, largest {largest:e})",
            terms.len()
        )));
    }
    Ok(lse - (batch.len() as f64).ln())
}

/// `R̂` on the linear scale.
pub fn is_ratio_estimate<F, G>(batch: &[Vec<f64>], log_p_t: F, log_p_star: G) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    log_is_ratio_estimate(batch, log_p_t, log_p_star).map(f64::exp)
}

/// `ln r_d = ln w + ln R̂ + [ln p(θ*) - ln p(θ_t)] + ln[π(θ_t|θ*)/π(θ*|θ_t)]`
/// with `p` the unnormalized posterior.
///
/// A proposal outside the support (`-inf`) gives `r_d = 0`.
pub fn log_dynamic_weight_ratio(
    log_w: f64,
    log_r_hat: f64,
    log_post_t: f64,
    log_post_star: f64,
    log_proposal_ratio: f64,
) -> Result<f64> {
    if !log_post_t.is_finite() {
        return Err(Error::InvalidState(format!(
            "current state has log-density {log_post_t}"
        )));
    }
    if !log_w.is_finite() || log_r_hat.is_nan() || log_proposal_ratio.is_nan() {
        return Err(Error::InvalidState(format!(
            "non-finite inputs: ln w = {log_w}, ln R = {log_r_hat}"
        )));
    }
    if log_post_star == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if log_post_star.is_nan() || log_post_star == f64::INFINITY {
        return Err(Error::InvalidState(format!(
            "proposal has log-density {log_post_star}"
        )));
    }
    Ok(log_w + log_r_hat + (log_post_star - log_post_t) + log_proposal_ratio)
}

/// Linear-scale convenience wrapper around [`log_dynamic_weight_ratio`].
pub fn dynamic_weight_ratio(
    w: f64,
    r_hat: f64,
    log_post_t: f64,
    log_post_star: f64,
    log_proposal_ratio: f64,
) -> Result<f64> {
    if !(w > 0.0 && r_hat > 0.0) {
        return Err(Error::InvalidState(format!(
            "weight and ratio estimate must be positive (w = {w}, R = {r_hat})"
        )));
    }
    log_dynamic_weight_ratio(w.ln(), r_hat.ln(), log_post_t, log_post_star, log_proposal_ratio)
        .map(f64::exp)
}

/// Scheme-R switch: `φ = 1` while `W_up ≤ W_c`, else `0`.
pub fn switching_parameter(log_w_up_prev: f64, log_w_c: f64) -> bool {
    log_w_up_prev <= log_w_c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveOutcome {
    pub accepted: bool,
    pub log_weight: f64,
}

/// R-type move with `a = r_d/(r_d + φ)`: accept with weight `r_d/a`,
/// otherwise keep the state with weight `w/(1 - a)`.
///
/// With `φ = 0` every move with `r_d > 0` is accepted with weight `r_d`;
/// `r_d = 0, φ = 0` keeps the state unchanged.
pub fn r_move(log_w: f64, log_r_d: f64, phi: bool, u: f64) -> MoveOutcome {
    if !phi {
        return if log_r_d > f64::NEG_INFINITY {
            MoveOutcome {
                accepted: true,
                log_weight: log_r_d,
            }
        } else {
            MoveOutcome {
                accepted: false,
                log_weight: log_w,
            }
        };
    }
    // ln(r_d + 1)
    let log_sum = log_add_exp(log_r_d, 0.0);
    let a = (log_r_d - log_sum).exp();
    if u <= a && log_r_d > f64::NEG_INFINITY {
        MoveOutcome {
            accepted: true,
            log_weight: log_sum,
        }
    } else {
        MoveOutcome {
            accepted: false,
            log_weight: log_w + log_sum,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_states_give_unit_ratio() {
        let batch: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.37 - 3.0]).collect();
        let f = |y: &[f64]| -0.5 * y[0] * y[0];
        assert_eq!(is_ratio_estimate(&batch, f, f).unwrap(), 1.0);
        let far = |_: &[f64]| f64::NEG_INFINITY;
        assert_eq!(is_ratio_estimate(&batch, far, far).unwrap(), 1.0);
    }

    #[test]
    fn underflow_is_reported() {
        let batch = vec![vec![0.0]; 4];
        let r = is_ratio_estimate(&batch, |_| f64::NEG_INFINITY, |_| 0.0);
        assert!(matches!(r, Err(Error::Underflow(_))));
    }

    #[test]
    fn dynamic_ratio_examples() {
        assert!((dynamic_weight_ratio(2.0, 1.0, -3.0, -3.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let r = dynamic_weight_ratio(0.5, 0.8, -4.0, -3.0, 0.0).unwrap();
        assert!((r - 0.5 * 0.8 * 1f64.exp()).abs() < 1e-14);
        assert!((r - 1.0873).abs() < 1e-4);
        assert_eq!(
            dynamic_weight_ratio(1.0, 1.0, -3.0, f64::NEG_INFINITY, 0.0).unwrap(),
            0.0
        );
        assert!(matches!(
            dynamic_weight_ratio(1.0, 1.0, f64::NEG_INFINITY, -1.0, 0.0),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn switch_boundary_is_inclusive() {
        assert!(switching_parameter(5.0, 7.0));
        assert!(!switching_parameter(9.0, 7.0));
        assert!(switching_parameter(7.0, 7.0));
    }

    #[test]
    fn r_move_examples() {
        let w = 1.7f64;
        let acc = r_move(w.ln(), 3f64.ln(), true, 0.5);
        assert!(acc.accepted);
        assert!((acc.log_weight.exp() - 4.0).abs() < 1e-12);
        let rej = r_move(w.ln(), 3f64.ln(), true, 0.9);
        assert!(!rej.accepted);
        assert!((rej.log_weight.exp() - 4.0 * w).abs() < 1e-12);
        for u in [0.0, 0.3, 0.999] {
            let m = r_move(w.ln(), 0.2f64.ln(), false, u);
            assert!(m.accepted);
            assert!((m.log_weight.exp() - 0.2).abs() < 1e-15);
        }
        let stay = r_move(w.ln(), f64::NEG_INFINITY, false, 0.1);
        assert_eq!(stay, MoveOutcome { accepted: false, log_weight: w.ln() });
        let stay = r_move(w.ln(), f64::NEG_INFINITY, true, 0.0);
        assert!(!stay.accepted);
        assert_eq!(stay.log_weight, w.ln());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn weight_identities(
                log_w in -20.0f64..20.0,
                log_rd in -30.0f64..30.0,
                u in 0.0f64..1.0,
            ) {
                let m = r_move(log_w, log_rd, true, u);
                let (w, rd) = (log_w.exp(), log_rd.exp());
                let a = rd / (rd + 1.0);
                prop_assert_eq!(m.accepted, u <= a);
                let expected = if m.accepted { rd + 1.0 } else { w * (rd + 1.0) };
                prop_assert!((m.log_weight.exp() - expected).abs() <= 1e-12 * expected);
            }

            #[test]
            fn is_identity_for_any_batch(
                ys in proptest::collection::vec(-50.0f64..50.0, 1..40),
                s in 0.1f64..10.0,
            ) {
                let batch: Vec<Vec<f64>> = ys.iter().map(|y| vec![*y]).collect();
                let f = |y: &[f64]| -0.5 * y[0] * y[0] / (s * s);
                prop_assert_eq!(is_ratio_estimate(&batch, f, f).unwrap(), 1.0);
            }
        }
    }
}
