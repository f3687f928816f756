//! The updating vector and its box bounds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names and box bounds of the `d` updating parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParameterSpace {
    pub fn new(names: Vec<String>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let d = names.len();
        if lower.len() != d {
            return Err(Error::shape("lower bounds", d, lower.len()));
        }
        if upper.len() != d {
            return Err(Error::shape("upper bounds", d, upper.len()));
        }
        for i in 0..d {
            if !(lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]) {
                return Err(Error::Config(format!(
                    "parameter `{}` needs finite bounds with lower < upper, got [{}, {}]",
                    names[i], lower[i], upper[i]
                )));
            }
        }
        Ok(Self {
            names,
            lower,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&t, (&lo, &hi))| t >= lo && t <= hi)
    }

    pub fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::shape("updating vector", self.dim(), theta.len()));
        }
        for (i, &t) in theta.iter().enumerate() {
            if !(t >= self.lower[i] && t <= self.upper[i]) {
                return Err(Error::Config(format!(
                    "parameter `{}` = {t} outside [{}, {}]",
                    self.names[i], self.lower[i], self.upper[i]
                )));
            }
        }
        Ok(())
    }
}

/// A point of the parameter space, guaranteed to lie inside its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdatingVector {
    space: Arc<ParameterSpace>,
    values: Vec<f64>,
}

impl UpdatingVector {
    pub fn new(space: Arc<ParameterSpace>, values: Vec<f64>) -> Result<Self> {
        space.check(&values)?;
        Ok(Self { space, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space(&self) -> &Arc<ParameterSpace> {
        &self.space
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Arc<ParameterSpace> {
        Arc::new(
            ParameterSpace::new(
                vec!["rho".into(), "i".into()],
                vec![2500.0, 6e-9],
                vec![3500.0, 12e-9],
            )
            .unwrap(),
        )
    }

    #[test]
    fn bounds_are_inclusive() {
        let s = space();
        assert!(s.contains(&[2500.0, 12e-9]));
        assert!(!s.contains(&[2499.9, 8e-9]));
        assert!(!s.contains(&[3000.0]));
        assert!(!s.contains(&[f64::NAN, 8e-9]));
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert!(ParameterSpace::new(vec!["a".into()], vec![1.0], vec![1.0]).is_err());
        assert!(ParameterSpace::new(vec!["a".into()], vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn vector_enforces_bounds() {
        assert!(UpdatingVector::new(space(), vec![2785.0, 8.34e-9]).is_ok());
        assert!(UpdatingVector::new(space(), vec![4000.0, 8.34e-9]).is_err());
    }
}
