//! 3D Euler-Bernoulli beam finite elements and modal analysis.

pub mod assembly;
pub mod band;
pub mod bundled;
pub mod element;
pub mod lanczos;
pub mod modal;
pub mod model;
pub mod section;

pub use assembly::{assemble, assemble_banded};
pub use element::{element_matrices, Matrix12, Triad};
pub use modal::{modal_solve, ModalResult};
pub use model::{BeamModel, ModelSpec};
pub use section::{MaterialSection, Property};

use crate::error::{Error, Result};
use crate::math::{eigenvalue_from_frequency, frequency_from_eigenvalue};

/// Frequencies below this are treated as rigid-body modes.
pub const RIGID_BODY_HZ: f64 = 1e-3;

pub fn is_rigid_eigenvalue(lambda: f64) -> bool {
    lambda < eigenvalue_from_frequency(RIGID_BODY_HZ)
}

/// Full modal analysis of a model at `theta` (dense path).
pub fn modal_analysis(model: &BeamModel, theta: &[f64], n_modes: usize) -> Result<ModalResult> {
    let (k, m) = assemble(model, theta)?;
    modal_solve(&k, &m, n_modes)
}

/// Computes the lowest elastic natural frequencies of a model. Uses the
/// banded shift-invert path when the model is large enough for it to pay
/// off, and the dense solver otherwise or whenever the banded path cannot
/// certify its result.
#[derive(Debug, Clone)]
pub struct FrequencySolver {
    model: BeamModel,
    rigid: Vec<Vec<f64>>,
}

impl FrequencySolver {
    pub fn new(model: BeamModel) -> Self {
        let rigid = model.rigid_body_modes(model.banded_layout());
        Self { model, rigid }
    }

    pub fn model(&self) -> &BeamModel {
        &self.model
    }

    /// The `count` lowest eigenvalues at `theta`, rigid-body modes included.
    pub fn lowest_eigenvalues(&self, theta: &[f64], count: usize) -> Result<Vec<f64>> {
        let n = self.model.n_dofs();
        if count == 0 || count > n {
            return Err(Error::Config(format!(
                "requested {count} modes from a {n}-DOF system"
            )));
        }
        if n > 48 && count + self.rigid.len() < n / 2 {
            let (kb, mb) = assemble_banded(&self.model, theta)?;
            if let Ok(values) = lanczos::lowest_eigenvalues(&kb, &mb, &self.rigid, count) {
                return Ok(values);
            }
        }
        let (k, m) = assemble(&self.model, theta)?;
        modal::lowest_eigenvalues_dense(&k, &m, count)
    }

    /// The first `n_elastic` non-rigid frequencies in Hz, ascending.
    pub fn elastic_frequencies(&self, theta: &[f64], n_elastic: usize) -> Result<Vec<f64>> {
        let n = self.model.n_dofs();
        let count = (n_elastic + self.rigid.len()).min(n);
        let values = self.lowest_eigenvalues(theta, count)?;
        let elastic: Vec<f64> = values
            .into_iter()
            .filter(|&l| !is_rigid_eigenvalue(l))
            .map(frequency_from_eigenvalue)
            .collect();
        if elastic.len() < n_elastic {
            return Err(Error::Config(format!(
                "model has only {} elastic modes among its lowest {count}, {n_elastic} needed",
                elastic.len()
            )));
        }
        Ok(elastic[..n_elastic].to_vec())
    }
}
