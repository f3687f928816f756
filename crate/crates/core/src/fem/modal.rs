//! Dense generalized symmetric eigensolve `K v = λ M v`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::math::frequency_from_eigenvalue;

/// Natural frequencies (Hz, ascending) and mass-normalized mode vectors,
/// one column per frequency.
#[derive(Debug, Clone)]
pub struct ModalResult {
    pub frequencies: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub modes: DMatrix<f64>,
}

fn reduce(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !k.is_square() || !m.is_square() || k.nrows() != m.nrows() {
        return Err(Error::shape("stiffness/mass", m.nrows(), k.nrows()));
    }
    let chol = m.clone().cholesky().ok_or_else(|| {
        Error::DegenerateModel("mass matrix is not positive definite".into())
    })?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::DegenerateModel("singular mass factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::DegenerateModel("singular mass factor".into()))?;
    Ok(((&c + c.transpose()) * 0.5, l))
}

fn check_count(n_modes: usize, dim: usize) -> Result<()> {
    if n_modes == 0 || n_modes > dim {
        return Err(Error::Config(format!(
            "requested {n_modes} modes from a {dim}-DOF system"
        )));
    }
    Ok(())
}

/// The `n_modes` lowest eigenpairs. Each mode is scaled so `vᵀ M v = 1`
/// and its largest-magnitude entry is positive.
pub fn modal_solve(k: &DMatrix<f64>, m: &DMatrix<f64>, n_modes: usize) -> Result<ModalResult> {
    check_count(n_modes, k.nrows())?;
    let (c, l) = reduce(k, m)?;
    let eig = c
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical {
            message: "symmetric eigensolver did not converge".into(),
            iterations: 10_000,
        })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(n_modes);

    let lt = l.transpose();
    let mut modes = DMatrix::zeros(k.nrows(), n_modes);
    let mut eigenvalues = Vec::with_capacity(n_modes);
    for (col, &idx) in order.iter().enumerate() {
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut v = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::DegenerateModel("singular mass factor".into()))?;
        let norm = (v.transpose() * m * &v)[(0, 0)].sqrt();
        v /= norm;
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        if v[imax] < 0.0 {
            v = -v;
        }
        modes.set_column(col, &v);
        eigenvalues.push(eig.eigenvalues[idx]);
    }
    Ok(ModalResult {
        frequencies: eigenvalues.iter().map(|&l| frequency_from_eigenvalue(l)).collect(),
        eigenvalues,
        modes,
    })
}

/// The `count` lowest eigenvalues only.
pub fn lowest_eigenvalues_dense(
    k: &DMatrix<f64>,
    m: &DMatrix<f64>,
    count: usize,
) -> Result<Vec<f64>> {
    check_count(count, k.nrows())?;
    let (c, _) = reduce(k, m)?;
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            message: "non-finite eigenvalue".into(),
            iterations: 0,
        });
    }
    ev.sort_by(f64::total_cmp);
    ev.truncate(count);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spd(n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()));
        &a * a.transpose() + DMatrix::identity(n, n)
    }

    #[test]
    fn identity_pencil_gives_unit_eigenvalues() {
        let m = spd(6);
        let r = modal_solve(&m, &m, 6).unwrap();
        for (&l, &f) in r.eigenvalues.iter().zip(&r.frequencies) {
            assert!((l - 1.0).abs() < 1e-12);
            assert!((f - 1.0 / (2.0 * PI)).abs() < 1e-12);
            assert!((f - 0.15915).abs() < 1e-5);
        }
    }

    #[test]
    fn modes_are_mass_normalized_with_positive_peak() {
        let k = DMatrix::from_fn(5, 5, |i, j| match (i as i64 - j as i64).abs() {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let m = spd(5);
        let r = modal_solve(&k, &m, 5).unwrap();
        for c in 0..5 {
            let v = r.modes.column(c);
            assert!(((v.transpose() * &m * v)[(0, 0)] - 1.0).abs() < 1e-12);
            let peak = v.iter().fold(0.0f64, |a, x| if x.abs() > a.abs() { *x } else { a });
            assert!(peak > 0.0);
            let res = &k * v - r.eigenvalues[c] * (&m * v);
            assert!(res.norm() / (&k * v).norm() < 1e-10);
        }
        assert!(r.frequencies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_indefinite_mass_and_bad_counts() {
        let k = DMatrix::identity(3, 3);
        let m = -DMatrix::<f64>::identity(3, 3);
        assert!(matches!(modal_solve(&k, &m, 2), Err(Error::DegenerateModel(_))));
        assert!(modal_solve(&k, &k, 4).is_err());
        assert!(modal_solve(&k, &k, 0).is_err());
    }
}
