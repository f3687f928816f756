//! Two-node, 12-DOF Euler-Bernoulli beam element.
//!
//! Nodal DOF order is `[ux, uy, uz, rx, ry, rz]`; the element vector is
//! node a followed by node b. Shear deformation is neglected and the mass
//! matrix is the consistent one.

use nalgebra::{Matrix3, SMatrix, Vector3};

use super::section::MaterialSection;
use crate::error::{Error, Result};

pub type Matrix12 = SMatrix<f64, 12, 12>;

/// Local axes of an element. Rows of `rotation` are the local x, y and z
/// axes written in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub rotation: Matrix3<f64>,
}

impl Triad {
    /// Builds the triad for an element running from `a` to `b`. Local z is
    /// the component of `up` orthogonal to the element axis.
    pub fn from_nodes(a: [f64; 3], b: [f64; 3], up: [f64; 3]) -> Result<(Self, f64)> {
        let axis = Vector3::from(b) - Vector3::from(a);
        let length = axis.norm();
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "element length must be positive, got {length}"
            )));
        }
        let x = axis / length;
        let up = Vector3::from(up);
        let y = up.cross(&x);
        let ny = y.norm();
        if ny < 1e-9 * up.norm().max(f64::MIN_POSITIVE) || !ny.is_finite() {
            return Err(Error::InvalidGeometry(
                "orientation vector is parallel to the element axis".into(),
            ));
        }
        let y = y / ny;
        let z = x.cross(&y);
        let rotation = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        Ok((Self { rotation }, length))
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
        }
    }
}

fn local_stiffness(s: &MaterialSection, l: f64) -> Matrix12 {
    let mut k = Matrix12::zeros();
    let e = s.youngs_modulus;
    let ea = e * s.area / l;
    let gj = s.shear_modulus * s.torsion / l;
    let (l2, l3) = (l * l, l * l * l);

    k[(0, 0)] = ea;
    k[(0, 6)] = -ea;
    k[(6, 6)] = ea;

    k[(3, 3)] = gj;
    k[(3, 9)] = -gj;
    k[(9, 9)] = gj;

    // Bending in the local x-y plane (v, rz), inertia about z.
    let iz = e * s.i_max;
    k[(1, 1)] = 12.0 * iz / l3;
    k[(1, 5)] = 6.0 * iz / l2;
    k[(1, 7)] = -12.0 * iz / l3;
    k[(1, 11)] = 6.0 * iz / l2;
    k[(5, 5)] = 4.0 * iz / l;
    k[(5, 7)] = -6.0 * iz / l2;
    k[(5, 11)] = 2.0 * iz / l;
    k[(7, 7)] = 12.0 * iz / l3;
    k[(7, 11)] = -6.0 * iz / l2;
    k[(11, 11)] = 4.0 * iz / l;

    // Bending in the local x-z plane (w, ry), inertia about y.
    let iy = e * s.i_min;
    k[(2, 2)] = 12.0 * iy / l3;
    k[(2, 4)] = -6.0 * iy / l2;
    k[(2, 8)] = -12.0 * iy / l3;
    k[(2, 10)] = -6.0 * iy / l2;
    k[(4, 4)] = 4.0 * iy / l;
    k[(4, 8)] = 6.0 * iy / l2;
    k[(4, 10)] = 2.0 * iy / l;
    k[(8, 8)] = 12.0 * iy / l3;
    k[(8, 10)] = 6.0 * iy / l2;
    k[(10, 10)] = 4.0 * iy / l;

    mirror_upper(&mut k);
    k
}

fn local_mass(s: &MaterialSection, l: f64) -> Matrix12 {
    let mut m = Matrix12::zeros();
    let total = s.density * s.area * l;
    let c = total / 420.0;
    let l2 = l * l;

    m[(0, 0)] = total / 3.0;
    m[(0, 6)] = total / 6.0;
    m[(6, 6)] = total / 3.0;

    let rot = s.density * s.polar_moment() * l;
    m[(3, 3)] = rot / 3.0;
    m[(3, 9)] = rot / 6.0;
    m[(9, 9)] = rot / 3.0;

    m[(1, 1)] = 156.0 * c;
    m[(1, 5)] = 22.0 * l * c;
    m[(1, 7)] = 54.0 * c;
    m[(1, 11)] = -13.0 * l * c;
    m[(5, 5)] = 4.0 * l2 * c;
    m[(5, 7)] = 13.0 * l * c;
    m[(5, 11)] = -3.0 * l2 * c;
    m[(7, 7)] = 156.0 * c;
    m[(7, 11)] = -22.0 * l * c;
    m[(11, 11)] = 4.0 * l2 * c;

    m[(2, 2)] = 156.0 * c;
    m[(2, 4)] = -22.0 * l * c;
    m[(2, 8)] = 54.0 * c;
    m[(2, 10)] = 13.0 * l * c;
    m[(4, 4)] = 4.0 * l2 * c;
    m[(4, 8)] = -13.0 * l * c;
    m[(4, 10)] = -3.0 * l2 * c;
    m[(8, 8)] = 156.0 * c;
    m[(8, 10)] = 22.0 * l * c;
    m[(10, 10)] = 4.0 * l2 * c;

    mirror_upper(&mut m);
    m
}

fn mirror_upper(m: &mut Matrix12) {
    for i in 0..12 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
}

/// `Tᵀ A T` with `T = diag(R, R, R, R)`, computed block by block. The
/// result is symmetrized exactly.
fn to_global(local: &Matrix12, triad: &Triad) -> Matrix12 {
    let r = triad.rotation;
    let rt = r.transpose();
    let mut out = Matrix12::zeros();
    for bi in 0..4 {
        for bj in bi..4 {
            let block: Matrix3<f64> = local.fixed_view::<3, 3>(3 * bi, 3 * bj).into_owned();
            let g = rt * block * r;
            out.fixed_view_mut::<3, 3>(3 * bi, 3 * bj).copy_from(&g);
            if bi != bj {
                out.fixed_view_mut::<3, 3>(3 * bj, 3 * bi)
                    .copy_from(&g.transpose());
            }
        }
    }
    for i in 0..12 {
        for j in 0..i {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    out
}

/// Element stiffness and consistent mass in global coordinates.
pub fn element_matrices(
    section: &MaterialSection,
    length: f64,
    triad: &Triad,
) -> Result<(Matrix12, Matrix12)> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "element length must be positive, got {length}"
        )));
    }
    section.validate()?;
    let k = to_global(&local_stiffness(section, length), triad);
    let m = to_global(&local_mass(section, length), triad);
    Ok((k, m))
}
