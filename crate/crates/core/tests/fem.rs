use std::f64::consts::PI;

use fem_dwis::fem::bundled::{aircraft_frame, cantilever, STEEL_E, STEEL_RHO, STEEL_SIDE};
use fem_dwis::fem::{assemble, is_rigid_eigenvalue, modal_analysis, FrequencySolver};
use proptest::prelude::*;

fn cantilever_bending_hz(beta_l: f64) -> f64 {
    let a = STEEL_SIDE * STEEL_SIDE;
    let i = STEEL_SIDE.powi(4) / 12.0;
    beta_l * beta_l / (2.0 * PI) * (STEEL_E * i / (STEEL_RHO * a)).sqrt()
}

#[test]
fn cantilever_matches_closed_form_bending() {
    let model = cantilever(20);
    let theta = model.nominal().to_vec();
    let f = FrequencySolver::new(model).elastic_frequencies(&theta, 6).unwrap();
    // square section: each bending frequency appears once per plane
    for (k, beta_l) in [1.875_104_07, 4.694_091_13, 7.854_757_44].into_iter().enumerate() {
        let exact = cantilever_bending_hz(beta_l);
        for f in &f[2 * k..2 * k + 2] {
            assert!((f - exact).abs() / exact < 0.01, "{f} vs {exact}");
        }
    }
}

#[test]
fn free_frame_has_six_rigid_modes() {
    let model = aircraft_frame();
    let r = modal_analysis(&model, model.nominal(), 12).unwrap();
    let rigid = r.eigenvalues.iter().filter(|&&l| is_rigid_eigenvalue(l)).count();
    assert_eq!(rigid, 6);
    assert!(r.frequencies[6] > 1.0);
}

fn frame_theta() -> impl Strategy<Value = Vec<f64>> {
    let space = aircraft_frame().parameter_space().clone();
    (0..space.dim())
        .map(|i| space.lower[i]..space.upper[i])
        .collect::<Vec<_>>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frequencies_positive_and_ascending(theta in frame_theta()) {
        let solver = FrequencySolver::new(aircraft_frame());
        let f = solver.elastic_frequencies(&theta, 10).unwrap();
        prop_assert!(f[0] > 0.0);
        prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn density_scales_frequencies(theta in frame_theta(), c in 0.8f64..1.1) {
        let solver = FrequencySolver::new(aircraft_frame());
        let mut scaled = theta.clone();
        scaled[0] = (theta[0] * c).clamp(2500.0, 3500.0);
        let c = scaled[0] / theta[0];
        let f0 = solver.elastic_frequencies(&theta, 10).unwrap();
        let f1 = solver.elastic_frequencies(&scaled, 10).unwrap();
        for (a, b) in f0.iter().zip(&f1) {
            prop_assert!((b - a / c.sqrt()).abs() <= 1e-8 * a);
        }
    }

    // Bending inertias also enter the rotary mass, so only the torsion
    // constants are pure stiffness parameters.
    #[test]
    fn stiffer_section_never_lowers_a_frequency(theta in frame_theta(), k in 6..8usize, t in 0.0f64..1.0) {
        let model = aircraft_frame();
        let upper = model.parameter_space().upper[k];
        let solver = FrequencySolver::new(model);
        let mut stiffer = theta.clone();
        stiffer[k] = theta[k] + t * (upper - theta[k]);
        let f0 = solver.elastic_frequencies(&theta, 10).unwrap();
        let f1 = solver.elastic_frequencies(&stiffer, 10).unwrap();
        for (a, b) in f0.iter().zip(&f1) {
            prop_assert!(*b >= a * (1.0 - 1e-9));
        }
    }

    #[test]
    fn modes_solve_the_pencil(theta in frame_theta()) {
        let model = aircraft_frame();
        let (k, m) = assemble(&model, &theta).unwrap();
        let r = modal_analysis(&model, &theta, 16).unwrap();
        let scale = r.eigenvalues.last().unwrap().abs().max(1.0);
        for (j, l) in r.eigenvalues.iter().enumerate() {
            let v = r.modes.column(j);
            let res = &k * v - (&m * v) * *l;
            prop_assert!(res.amax() <= 1e-7 * scale * m.amax());
        }
        let gram = r.modes.transpose() * &m * &r.modes;
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn fast_path_agrees_with_dense(theta in frame_theta()) {
        let model = aircraft_frame();
        let dense = modal_analysis(&model, &theta, 16).unwrap();
        let fast = FrequencySolver::new(model).elastic_frequencies(&theta, 10).unwrap();
        for (a, b) in fast.iter().zip(&dense.frequencies[6..]) {
            prop_assert!((a - b).abs() <= 1e-7 * b);
        }
    }
}
