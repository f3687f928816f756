//! Frequency-error reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `100·|f^c - f^m| / f^m`.
pub fn percent_error(measured: f64, computed: f64) -> Result<f64> {
    if !(measured.is_finite() && measured > 0.0) {
        return Err(Error::InvalidData(format!(
            "measured frequency must be positive, got {measured}"
        )));
    }
    if !computed.is_finite() {
        return Err(Error::InvalidData(format!(
            "computed frequency is not finite: {computed}"
        )));
    }
    Ok(100.0 * (computed - measured).abs() / measured)
}

/// Mean of per-mode percent errors.
pub fn total_mean_error(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::InvalidData("cannot average an empty report".into()));
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub mode: usize,
    pub measured: f64,
    pub computed: f64,
    pub error_percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub label: String,
    pub rows: Vec<ReportRow>,
    pub tme: f64,
}

impl FrequencyReport {
    pub fn new(label: impl Into<String>, measured: &[f64], computed: &[f64]) -> Result<Self> {
        if measured.len() != computed.len() {
            return Err(Error::shape("computed frequencies", measured.len(), computed.len()));
        }
        let rows = measured
            .iter()
            .zip(computed)
            .enumerate()
            .map(|(i, (&m, &c))| {
                Ok(ReportRow {
                    mode: i + 1,
                    measured: m,
                    computed: c,
                    error_percent: percent_error(m, c)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let errors: Vec<f64> = rows.iter().map(|r| r.error_percent).collect();
        let tme = total_mean_error(&errors)?;
        Ok(Self {
            label: label.into(),
            rows,
            tme,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_error_examples() {
        assert!((percent_error(6.38, 5.71).unwrap() - 10.50).abs() < 0.01);
        assert_eq!(percent_error(35.65, 35.65).unwrap(), 0.0);
        assert_eq!(percent_error(12.0, 12.0).unwrap(), 0.0);
        assert!(matches!(percent_error(0.0, 1.0), Err(Error::InvalidData(_))));
    }

    #[test]
    fn tme_examples() {
        assert_eq!(total_mean_error(&[5.0]).unwrap(), 5.0);
        assert!(total_mean_error(&[]).is_err());
        let r = FrequencyReport::new("x", &[10.0, 20.0], &[11.0, 19.0]).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!((r.tme - 7.5).abs() < 1e-12);
    }
}
