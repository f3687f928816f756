//! Synthetic measured data for desk experiments.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bayes::{MeasuredData, DEFAULT_RELATIVE_NOISE};
use crate::error::{Error, Result};
use crate::fem::FrequencySolver;
use crate::rng::StreamRng;

/// `f^m_i = f^c_i(θ_true)·(1 + c·z_i)` with `Σ_f = diag((c·f^m_i)²)`.
///
/// With `c = 0` the frequencies are exact and the covariance falls back to
/// the default relative noise, since a zero covariance is not usable.
pub fn generate_synthetic_data(
    solver: &FrequencySolver,
    theta_true: &[f64],
    n_modes: usize,
    c: f64,
    rng: &mut StreamRng,
) -> Result<MeasuredData> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::Config(format!("noise level must be non-negative, got {c}")));
    }
    solver.model().parameter_space().check(theta_true)?;
    let fc = solver.elastic_frequencies(theta_true, n_modes)?;
    let fm: Vec<f64> = fc
        .iter()
        .map(|f| {
            let z: f64 = rng.sample(StandardNormal);
            f * (1.0 + c * z)
        })
        .collect();
    let rel = if c > 0.0 { c } else { DEFAULT_RELATIVE_NOISE };
    MeasuredData::with_relative_noise(fm, rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::bundled;
    use crate::rng::stream;

    #[test]
    fn noiseless_is_exact() {
        let solver = FrequencySolver::new(bundled::cantilever(10));
        let theta = solver.model().nominal().to_vec();
        let d = generate_synthetic_data(&solver, &theta, 4, 0.0, &mut stream(1, 9)).unwrap();
        assert_eq!(d.frequencies(), &solver.elastic_frequencies(&theta, 4).unwrap()[..]);
    }

    #[test]
    fn seeded_and_scaled() {
        let solver = FrequencySolver::new(bundled::cantilever(6));
        let theta = solver.model().nominal().to_vec();
        let a = generate_synthetic_data(&solver, &theta, 3, 0.02, &mut stream(4, 1)).unwrap();
        let b = generate_synthetic_data(&solver, &theta, 3, 0.02, &mut stream(4, 1)).unwrap();
        assert_eq!(a.frequencies(), b.frequencies());

        let fc = solver.elastic_frequencies(&theta, 3).unwrap();
        let mut rng = stream(5, 1);
        let n = 1000;
        let draws: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                generate_synthetic_data(&solver, &theta, 3, 0.02, &mut rng)
                    .unwrap()
                    .frequencies()
                    .to_vec()
            })
            .collect();
        for i in 0..3 {
            let mean = draws.iter().map(|d| d[i]).sum::<f64>() / n as f64;
            let sd = (draws.iter().map(|d| (d[i] - mean).powi(2)).sum::<f64>() / (n - 1) as f64)
                .sqrt();
            let rel = sd / mean;
            assert!((rel - 0.02).abs() < 0.1 * 0.02, "mode {i}: {rel}");
            assert!((mean - fc[i]).abs() < 4.0 * 0.02 * fc[i] / (n as f64).sqrt());
        }
    }

    #[test]
    fn out_of_bounds_truth_rejected() {
        let solver = FrequencySolver::new(bundled::cantilever(6));
        let mut theta = solver.model().nominal().to_vec();
        theta[0] = -1.0;
        assert!(generate_synthetic_data(&solver, &theta, 3, 0.01, &mut stream(0, 0)).is_err());
    }
}
