//! Shift-invert Lanczos for the lowest eigenvalues of a banded pencil.
//!
//! Rigid-body modes are deflated explicitly (they form an exactly
//! degenerate cluster a single-vector Krylov method cannot resolve), the
//! Krylov basis is fully re-orthogonalized in the `M` inner product, and
//! the result is certified with a Sturm count: the number of negative
//! pivots of `K - μM` must equal the number of eigenvalues reported below
//! `μ`. Any failure is reported as an error so callers can fall back to
//! the dense solver.

use nalgebra::DMatrix;

use super::band::SymBand;
use crate::error::{Error, Result};

const SHIFT: f64 = -1.0;
const RITZ_TOL: f64 = 1e-11;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct MBasis {
    vecs: Vec<Vec<f64>>,
    mvecs: Vec<Vec<f64>>,
}

impl MBasis {
    fn new() -> Self {
        Self {
            vecs: Vec::new(),
            mvecs: Vec::new(),
        }
    }

    /// Removes the `M`-projection of `w` onto the basis (two passes).
    fn orthogonalize(&self, w: &mut [f64]) {
        for _ in 0..2 {
            for (v, mv) in self.vecs.iter().zip(&self.mvecs) {
                let c = dot(mv, w);
                axpy(-c, v, w);
            }
        }
    }
}

/// The `count` smallest eigenvalues of `K v = λ M v`, ascending.
/// `rigid` spans known null vectors of `K` (may be empty).
pub fn lowest_eigenvalues(
    k: &SymBand,
    m: &SymBand,
    rigid: &[Vec<f64>],
    count: usize,
) -> Result<Vec<f64>> {
    let n = k.dim();
    let numerical = |message: String, iterations: usize| Error::Numerical {
        message,
        iterations,
    };
    let mut mw = vec![0.0; n];

    // M-orthonormal rigid basis
    let mut phi = MBasis::new();
    for r in rigid {
        let mut v = r.clone();
        phi.orthogonalize(&mut v);
        m.mul_vec(&v, &mut mw);
        let nrm = dot(&v, &mw);
        if nrm > 0.0 && nrm.is_finite() {
            let s = 1.0 / nrm.sqrt();
            v.iter_mut().for_each(|x| *x *= s);
            phi.mvecs.push(mw.iter().map(|x| x * s).collect());
            phi.vecs.push(v);
        }
    }
    let n_rigid = phi.vecs.len();
    let mut rigid_values: Vec<f64> = if n_rigid > 0 {
        let mut kphi = vec![0.0; n];
        let mut proj = DMatrix::zeros(n_rigid, n_rigid);
        for (j, v) in phi.vecs.iter().enumerate() {
            k.mul_vec(v, &mut kphi);
            for (i, u) in phi.vecs.iter().enumerate() {
                proj[(i, j)] = dot(u, &kphi);
            }
        }
        let proj = (&proj + proj.transpose()) * 0.5;
        proj.symmetric_eigenvalues().iter().copied().collect()
    } else {
        Vec::new()
    };
    rigid_values.sort_by(f64::total_cmp);

    if count <= n_rigid {
        rigid_values.truncate(count);
        return Ok(rigid_values);
    }
    let elastic = count - n_rigid;
    let space = n - n_rigid;
    if elastic >= space {
        return Err(numerical(
            format!("{count} eigenvalues requested from a {n}-DOF system; use the dense solver"),
            0,
        ));
    }
    // one extra converged value brackets the Sturm check
    let want = elastic + 1;
    let max_steps = space.min((3 * want + 20).max(60));

    let op = k
        .shifted(m, SHIFT)
        .cholesky()
        .ok_or_else(|| numerical("shifted stiffness is not positive definite".into(), 0))?;

    let mut q: Vec<f64> = (0..n)
        .map(|i| (1.3 * i as f64 + 0.7).sin() + 0.5 * (0.37 * i as f64).cos())
        .collect();
    phi.orthogonalize(&mut q);
    m.mul_vec(&q, &mut mw);
    let nrm = dot(&q, &mw).sqrt();
    if !(nrm > 0.0) {
        return Err(numerical("degenerate start vector".into(), 0));
    }
    q.iter_mut().for_each(|x| *x /= nrm);
    let mut basis = MBasis::new();
    basis.mvecs.push(mw.iter().map(|x| x / nrm).collect());
    basis.vecs.push(q);

    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut converged: Option<Vec<f64>> = None;

    for j in 0..max_steps {
        let mut w = basis.mvecs[j].clone();
        op.solve_in_place(&mut w);
        let a = dot(&basis.mvecs[j], &w);
        alpha.push(a);
        phi.orthogonalize(&mut w);
        basis.orthogonalize(&mut w);
        m.mul_vec(&w, &mut mw);
        let b = dot(&w, &mw).max(0.0).sqrt();
        let steps = j + 1;

        let last = steps == max_steps || !(b > 1e-14 * a.abs());
        if steps >= want && ((steps - want).is_multiple_of(4) || last) {
            let t = DMatrix::from_fn(steps, steps, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = t.symmetric_eigen();
            let mut idx: Vec<usize> = (0..steps).collect();
            idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let ok = idx[..want].iter().all(|&i| {
                let nu = eig.eigenvalues[i];
                let bound = (b * eig.eigenvectors[(steps - 1, i)]).abs();
                nu > 0.0 && bound <= RITZ_TOL * nu
            });
            if ok {
                converged = Some(
                    idx[..want]
                        .iter()
                        .map(|&i| SHIFT + 1.0 / eig.eigenvalues[i])
                        .collect(),
                );
                break;
            }
        }
        if last {
            break;
        }
        beta.push(b);
        let inv = 1.0 / b;
        w.iter_mut().for_each(|x| *x *= inv);
        basis.mvecs.push(mw.iter().map(|x| x * inv).collect());
        basis.vecs.push(w);
    }

    let steps = alpha.len();
    let elastic_values = converged.ok_or_else(|| {
        numerical(
            format!("Lanczos did not converge {want} Ritz values"),
            steps,
        )
    })?;

    let mut all = rigid_values;
    all.extend(elastic_values);
    all.sort_by(f64::total_cmp);
    let (below, above) = (all[count - 1], all[count]);
    if !(above - below > 1e-9 * above.abs().max(1.0)) {
        return Err(numerical("clustered spectrum at the cut-off".into(), steps));
    }
    let mu = 0.5 * (below + above);
    let inertia = k.shifted(m, mu).negative_pivots();
    if inertia != Some(count) {
        return Err(numerical(
            format!("Sturm count {inertia:?} disagrees with {count} computed eigenvalues"),
            steps,
        ));
    }
    all.truncate(count);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assembly, bundled, modal};

    #[test]
    fn matches_dense_on_frame() {
        let model = bundled::aircraft_frame();
        let theta = model.nominal();
        let (kb, mb) = assembly::assemble_banded(&model, theta).unwrap();
        let rigid = model.rigid_body_modes(model.banded_layout());
        let fast = lowest_eigenvalues(&kb, &mb, &rigid, 16).unwrap();
        let (k, m) = assembly::assemble(&model, theta).unwrap();
        let dense = modal::lowest_eigenvalues_dense(&k, &m, 16).unwrap();
        for i in 6..16 {
            assert!((fast[i] - dense[i]).abs() < 1e-8 * dense[i], "{i}: {} {}", fast[i], dense[i]);
        }
        for i in 0..6 {
            assert!(fast[i].abs() < 1e-3 && dense[i].abs() < 1e-3);
        }
    }

    #[test]
    fn degenerate_pairs_are_never_silently_wrong() {
        // square section: bending pairs coincide, which a single Krylov
        // vector may or may not resolve; the result must be right or an error
        let model = bundled::cantilever(20);
        let (kb, mb) = assembly::assemble_banded(&model, model.nominal()).unwrap();
        let (k, m) = assembly::assemble(&model, model.nominal()).unwrap();
        let dense = modal::lowest_eigenvalues_dense(&k, &m, 6).unwrap();
        for count in [1, 2, 3, 4, 5] {
            match lowest_eigenvalues(&kb, &mb, &[], count) {
                Ok(fast) => {
                    for i in 0..count {
                        assert!((fast[i] - dense[i]).abs() < 1e-8 * dense[i]);
                    }
                }
                Err(e) => assert!(matches!(e, Error::Numerical { .. })),
            }
        }
    }

    #[test]
    fn clamped_rectangular_bar_matches_dense() {
        let model = bundled::cantilever(20);
        let mut theta = model.nominal().to_vec();
        theta[2] *= 1.3;
        let (kb, mb) = assembly::assemble_banded(&model, &theta).unwrap();
        let fast = lowest_eigenvalues(&kb, &mb, &[], 8).unwrap();
        let (k, m) = assembly::assemble(&model, &theta).unwrap();
        let dense = modal::lowest_eigenvalues_dense(&k, &m, 8).unwrap();
        for i in 0..8 {
            assert!((fast[i] - dense[i]).abs() < 1e-8 * dense[i]);
        }
    }
}
