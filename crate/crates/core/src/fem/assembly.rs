use nalgebra::DMatrix;

use super::band::SymBand;
use super::element::{element_matrices, Matrix12};
use super::model::{BeamModel, DofLayout};
use crate::error::{Error, Result};

fn for_each_element(
    model: &BeamModel,
    theta: &[f64],
    layout: &DofLayout,
    mut sink: impl FnMut(&[Option<usize>; 12], &Matrix12, &Matrix12),
) -> Result<()> {
    model.parameter_space().check(theta)?;
    let sections = model.element_sections(theta)?;
    for (e, section) in model.elements().iter().zip(&sections) {
        let (ke, me) = element_matrices(section, e.length, &e.triad)?;
        sink(&layout.element_dofs(e), &ke, &me);
    }
    Ok(())
}

/// Global stiffness and mass with constrained DOFs removed, in natural DOF
/// order (`6·node + local`, skipping constrained entries).
pub fn assemble(model: &BeamModel, theta: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let layout = model.dof_layout();
    let n = layout.size;
    if n == 0 {
        return Err(Error::DegenerateModel("every DOF is constrained".into()));
    }
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    for_each_element(model, theta, layout, |dofs, ke, me| {
        for a in 0..12 {
            let Some(i) = dofs[a] else { continue };
            for b in 0..12 {
                let Some(j) = dofs[b] else { continue };
                k[(i, j)] += ke[(a, b)];
                m[(i, j)] += me[(a, b)];
            }
        }
    })?;
    if m.clone().cholesky().is_none() {
        return Err(Error::DegenerateModel(
            "mass matrix is not positive definite".into(),
        ));
    }
    Ok((k, m))
}

/// Banded assembly in the bandwidth-reducing DOF order.
pub fn assemble_banded(model: &BeamModel, theta: &[f64]) -> Result<(SymBand, SymBand)> {
    let layout = model.banded_layout();
    let n = layout.size;
    if n == 0 {
        return Err(Error::DegenerateModel("every DOF is constrained".into()));
    }
    let mut k = SymBand::zeros(n, layout.half_bandwidth);
    let mut m = SymBand::zeros(n, layout.half_bandwidth);
    for_each_element(model, theta, layout, |dofs, ke, me| {
        for a in 0..12 {
            let Some(i) = dofs[a] else { continue };
            for b in 0..12 {
                let Some(j) = dofs[b] else { continue };
                if j <= i {
                    k.add(i, j, ke[(a, b)]);
                    m.add(i, j, me[(a, b)]);
                }
            }
        }
    })?;
    Ok((k, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::bundled;
    use crate::fem::element::element_matrices;

    #[test]
    fn single_free_element_equals_element_matrices() {
        let mut spec = bundled::cantilever(1).spec().clone();
        spec.constraints.clear();
        let model = BeamModel::from_spec(spec).unwrap();
        let (k, m) = assemble(&model, model.nominal()).unwrap();
        let e = &model.elements()[0];
        let section = model.element_sections(model.nominal()).unwrap()[0];
        let (ke, me) = element_matrices(&section, e.length, &e.triad).unwrap();
        assert_eq!(k.nrows(), 12);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(k[(i, j)], ke[(i, j)]);
                assert_eq!(m[(i, j)], me[(i, j)]);
            }
        }
    }

    #[test]
    fn free_two_element_bar_is_in_equilibrium() {
        let mut spec = bundled::cantilever(2).spec().clone();
        spec.constraints.clear();
        let model = BeamModel::from_spec(spec).unwrap();
        let (k, _) = assemble(&model, model.nominal()).unwrap();
        assert_eq!(k.nrows(), 18);
        let scale = k.abs().max();
        // translational DOFs: forces from a unit translation sum to zero
        for dir in 0..3 {
            let mut v = nalgebra::DVector::zeros(18);
            for node in 0..3 {
                v[6 * node + dir] = 1.0;
            }
            let f = &k * v;
            assert!(f.abs().max() < 1e-9 * scale);
        }
        for row in 0..18 {
            let s: f64 = (0..3)
                .flat_map(|node| (0..3).map(move |d| 6 * node + d))
                .map(|c| k[(row, c)])
                .sum();
            assert!(s.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn clamped_cantilever_is_positive_definite() {
        let model = bundled::cantilever(20);
        let (k, m) = assemble(&model, model.nominal()).unwrap();
        assert_eq!(k.nrows(), 120);
        assert!(k.clone().cholesky().is_some());
        assert_eq!(k, k.transpose());
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn frame_matrices_are_exactly_symmetric() {
        let model = bundled::aircraft_frame();
        let (k, m) = assemble(&model, model.nominal()).unwrap();
        assert_eq!(k, k.transpose());
        assert_eq!(m, m.transpose());
        assert_eq!(k.nrows(), 156);
    }

    #[test]
    fn banded_matches_dense_up_to_permutation() {
        let model = bundled::aircraft_frame();
        let (k, m) = assemble(&model, model.nominal()).unwrap();
        let (kb, mb) = assemble_banded(&model, model.nominal()).unwrap();
        let nat = model.dof_layout();
        let band = model.banded_layout();
        for g in 0..nat.index.len() {
            for h in 0..nat.index.len() {
                if let (Some(i), Some(j), Some(p), Some(q)) =
                    (nat.index[g], nat.index[h], band.index[g], band.index[h])
                {
                    assert_eq!(k[(i, j)], kb.get(p, q));
                    assert_eq!(m[(i, j)], mb.get(p, q));
                }
            }
        }
    }

    #[test]
    fn out_of_bounds_theta_rejected() {
        let model = bundled::aircraft_frame();
        let mut theta = model.nominal().to_vec();
        theta[0] = 10.0;
        assert!(assemble(&model, &theta).is_err());
    }
}
