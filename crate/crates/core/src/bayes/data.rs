use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::GaussianForm;

/// Relative frequency noise used to build `Σ_f` when none is given.
pub const DEFAULT_RELATIVE_NOISE: f64 = 0.01;

/// Measured natural frequencies and their covariance `Σ_f`.
#[derive(Debug, Clone)]
pub struct MeasuredData {
    frequencies: Vec<f64>,
    covariance: DMatrix<f64>,
    form: GaussianForm,
}

/// On-disk form: frequencies plus either a full covariance or a relative
/// noise level `c` giving `Σ_f = diag((c·f_i)²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredDataFile {
    pub frequencies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
}

impl MeasuredData {
    pub fn new(frequencies: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::InvalidData("at least one measured frequency is required".into()));
        }
        if let Some(f) = frequencies.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::InvalidData(format!(
                "measured frequencies must be positive, got {f}"
            )));
        }
        if covariance.nrows() != frequencies.len() || covariance.ncols() != frequencies.len() {
            return Err(Error::shape(
                "frequency covariance",
                frequencies.len(),
                covariance.nrows(),
            ));
        }
        let form = GaussianForm::new(&covariance)?;
        Ok(Self {
            frequencies,
            covariance,
            form,
        })
    }

    /// `Σ_f = diag((c·f_i)²)`.
    pub fn with_relative_noise(frequencies: Vec<f64>, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Covariance(format!(
                "relative noise must be positive, got {c}"
            )));
        }
        let diag = nalgebra::DVector::from_iterator(
            frequencies.len(),
            frequencies.iter().map(|f| (c * f).powi(2)),
        );
        Self::new(frequencies, DMatrix::from_diagonal(&diag))
    }

    pub fn from_file_spec(spec: &MeasuredDataFile) -> Result<Self> {
        match (&spec.covariance, spec.relative_noise) {
            (Some(_), Some(_)) => Err(Error::Config(
                "measured data gives both `covariance` and `relative_noise`".into(),
            )),
            (Some(rows), None) => {
                let n = spec.frequencies.len();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::shape("frequency covariance", n, rows.len()));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Self::new(spec.frequencies.clone(), DMatrix::from_row_slice(n, n, &flat))
            }
            (None, c) => Self::with_relative_noise(
                spec.frequencies.clone(),
                c.unwrap_or(DEFAULT_RELATIVE_NOISE),
            ),
        }
    }

    pub fn to_file_spec(&self) -> MeasuredDataFile {
        let n = self.len();
        MeasuredDataFile {
            frequencies: self.frequencies.clone(),
            relative_noise: None,
            covariance: Some(
                (0..n)
                    .map(|i| (0..n).map(|j| self.covariance[(i, j)]).collect())
                    .collect(),
            ),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: MeasuredDataFile = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_file_spec(&spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file_spec()).expect("measured data serializes")
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub(crate) fn form(&self) -> &GaussianForm {
        &self.form
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_noise_default_and_round_trip() {
        let spec: MeasuredDataFile = toml::from_str("frequencies = [6.38, 16.1]").unwrap();
        let d = MeasuredData::from_file_spec(&spec).unwrap();
        assert!((d.covariance()[(0, 0)] - (0.0638f64).powi(2)).abs() < 1e-15);
        let back = MeasuredData::from_file_spec(&toml::from_str(&d.to_toml()).unwrap()).unwrap();
        assert_eq!(back.frequencies(), d.frequencies());
        assert_eq!(back.covariance(), d.covariance());
    }

    #[test]
    fn invalid_inputs() {
        assert!(MeasuredData::with_relative_noise(vec![], 0.01).is_err());
        assert!(MeasuredData::with_relative_noise(vec![0.0], 0.01).is_err());
        assert!(MeasuredData::with_relative_noise(vec![1.0], 0.0).is_err());
        let both = MeasuredDataFile {
            frequencies: vec![1.0],
            relative_noise: Some(0.1),
            covariance: Some(vec![vec![1.0]]),
        };
        assert!(MeasuredData::from_file_spec(&both).is_err());
        let bad = MeasuredDataFile {
            frequencies: vec![1.0, 2.0],
            relative_noise: None,
            covariance: Some(vec![vec![1.0, 2.0], vec![2.0, 1.0]]),
        };
        assert!(matches!(
            MeasuredData::from_file_spec(&bad),
            Err(Error::Covariance(_))
        ));
    }
}
