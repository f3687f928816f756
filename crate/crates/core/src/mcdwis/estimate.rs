use super::Population;
use crate::error::{Error, Result};

/// Streaming self-normalized weighted mean `Σ w x / Σ w` with weights
/// supplied as logarithms. Sums are held relative to the largest weight
/// seen so far, so the weights may span any range.
#[derive(Debug, Clone)]
pub struct WeightedMean {
    log_scale: f64,
    sum_w: f64,
    sum_wx: Vec<f64>,
    count: usize,
}

impl WeightedMean {
    pub fn new(dim: usize) -> Self {
        Self {
            log_scale: f64::NEG_INFINITY,
            sum_w: 0.0,
            sum_wx: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn add(&mut self, log_w: f64, x: &[f64]) {
        debug_assert_eq!(x.len(), self.sum_wx.len());
        if log_w == f64::NEG_INFINITY {
            return;
        }
        if log_w > self.log_scale {
            let shrink = (self.log_scale - log_w).exp();
            self.sum_w *= shrink;
            self.sum_wx.iter_mut().for_each(|v| *v *= shrink);
            self.log_scale = log_w;
        }
        let w = (log_w - self.log_scale).exp();
        self.sum_w += w;
        for (s, xi) in self.sum_wx.iter_mut().zip(x) {
            *s += w * xi;
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Result<Vec<f64>> {
        if !(self.sum_w > 0.0) || !self.log_scale.is_finite() {
            return Err(Error::Estimation("total weight is zero".into()));
        }
        Ok(self.sum_wx.iter().map(|s| s / self.sum_w).collect())
    }
}

/// `Σ_{t,i} w_{t,i} ρ(θ_{t,i}) / Σ_{t,i} w_{t,i}` over the given populations.
pub fn weighted_mean<E, F>(history: &[Population<E>], rho: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if history.is_empty() {
        return Err(Error::Estimation("no populations to average".into()));
    }
    let mut acc = WeightedMean::new(1);
    for pop in history {
        for s in &pop.samples {
            if !s.log_weight.is_finite() {
                return Err(Error::Estimation(format!(
                    "non-finite log-weight {}",
                    s.log_weight
                )));
            }
            acc.add(s.log_weight, &[rho(&s.theta)]);
        }
    }
    Ok(acc.mean()?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcdwis::WeightedSample;

    fn pop(items: &[(f64, f64)]) -> Population<()> {
        Population {
            samples: items
                .iter()
                .map(|&(x, w)| WeightedSample {
                    theta: vec![x],
                    log_weight: w.ln(),
                    log_density: 0.0,
                    state: (),
                })
                .collect(),
            generation: 1,
            log_w_up: 0.0,
            log_w_low: 0.0,
        }
    }

    #[test]
    fn examples() {
        let h = [pop(&[(1.0, 3.0), (5.0, 1.0)])];
        assert!((weighted_mean(&h, |t| t[0]).unwrap() - 2.0).abs() < 1e-15);
        let h = [pop(&[(1.0, 2.0), (4.0, 2.0)]), pop(&[(7.0, 2.0)])];
        assert!((weighted_mean(&h, |t| t[0]).unwrap() - 4.0).abs() < 1e-15);
        assert!((weighted_mean(&h, |_| 2.5).unwrap() - 2.5).abs() < 1e-15);
        assert!(weighted_mean::<(), _>(&[], |t| t[0]).is_err());
    }

    #[test]
    fn extreme_log_weights() {
        let mut acc = WeightedMean::new(1);
        acc.add(-2000.0, &[10.0]);
        acc.add(1500.0, &[1.0]);
        acc.add(1500.0, &[3.0]);
        assert!((acc.mean().unwrap()[0] - 2.0).abs() < 1e-15);
        assert!(WeightedMean::new(2).mean().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn invariant_to_weight_scaling(
                items in proptest::collection::vec((-10.0f64..10.0, -20.0f64..20.0), 1..50),
                log_c in -300.0f64..300.0,
            ) {
                let mut a = WeightedMean::new(1);
                let mut b = WeightedMean::new(1);
                for &(x, lw) in &items {
                    a.add(lw, &[x]);
                    b.add(lw + log_c, &[x]);
                }
                let (ma, mb) = (a.mean().unwrap()[0], b.mean().unwrap()[0]);
                prop_assert!((ma - mb).abs() <= 1e-12 * ma.abs().max(1.0));
            }
        }
    }
}
