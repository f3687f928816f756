//! The two models shipped with the crate.
//!
//! * [`cantilever`]: a clamped steel bar with a closed-form Euler-Bernoulli
//!   solution, used to validate the element and the eigensolver.
//! * [`aircraft_frame`]: a free-free beam frame loosely shaped like a
//!   small aircraft testbed (fuselage, two wings, vertical and horizontal
//!   tail). Its eight updating parameters follow the usual wing/tail
//!   inertia parameterization: global density, fin minor inertia, minor and
//!   major inertia of each wing, and torsion constant of each wing. The
//!   geometry is a stand-in, not a reproduction of any particular test rig.
//!
//! Canonical TOML copies live in `models/` next to this crate.

use std::collections::BTreeMap;

use super::model::{BeamModel, BindingSpec, ConstraintSpec, ElementSpec, ModelSpec, ParameterSpec};
use super::section::{MaterialSection, Property};

pub const CANTILEVER_TOML: &str = include_str!("../../models/cantilever.toml");
pub const FRAME_TOML: &str = include_str!("../../models/frame.toml");

pub const STEEL_E: f64 = 210e9;
pub const STEEL_RHO: f64 = 7800.0;
pub const STEEL_SIDE: f64 = 0.01;

/// Nominal frame updating vector.
pub const FRAME_NOMINAL: [f64; 8] = [2785.0, 8.34e-9, 8.34e-9, 8.34e-7, 8.34e-9, 8.34e-7, 4e-8, 4e-8];
pub const FRAME_LOWER: [f64; 8] = [2500.0, 6e-9, 8e-9, 6e-7, 8e-9, 6e-7, 3e-8, 3e-8];
pub const FRAME_UPPER: [f64; 8] = [3500.0, 12e-9, 11.2e-9, 12e-7, 11.2e-9, 12e-7, 6e-8, 6e-8];
/// Diagonal of the initial parameter covariance (standard deviations).
pub const FRAME_SIGMA: [f64; 8] = [5e2, 5e-9, 5e-9, 5e-7, 5e-9, 5e-7, 5e-8, 5e-8];
pub const FRAME_PARAMETERS: [&str; 8] = [
    "rho",
    "vtp_i_min",
    "lw_i_min",
    "lw_i_max",
    "rw_i_min",
    "rw_i_max",
    "lw_torsion",
    "rw_torsion",
];

fn bind_group(group: &str, property: Property) -> BindingSpec {
    BindingSpec {
        group: Some(group.into()),
        elements: Vec::new(),
        property,
    }
}

/// Clamped 1 m steel bar with a 10 mm square section, split into
/// `n_elements` elements along global x. Updating parameters: density and
/// both bending inertias.
pub fn cantilever(n_elements: usize) -> BeamModel {
    assert!(n_elements >= 1);
    let length = 1.0;
    let nodes = (0..=n_elements)
        .map(|i| [length * i as f64 / n_elements as f64, 0.0, 0.0])
        .collect();
    let section = MaterialSection::rectangle(STEEL_E, 0.3, STEEL_RHO, STEEL_SIDE, STEEL_SIDE);
    let elements = (0..n_elements)
        .map(|i| ElementSpec {
            nodes: [i, i + 1],
            section: "steel_bar".into(),
            up: [0.0, 0.0, 1.0],
            group: Some("bar".into()),
        })
        .collect();
    let inertia = section.i_min;
    let spec = ModelSpec {
        name: "cantilever".into(),
        description: "1 m steel cantilever, 10 mm square section, clamped at node 0".into(),
        nodes,
        constraints: vec![ConstraintSpec {
            node: 0,
            dofs: (0..6).collect(),
        }],
        parameters: vec![
            ParameterSpec {
                name: "rho".into(),
                lower: 6000.0,
                upper: 9600.0,
                nominal: STEEL_RHO,
                bind: vec![bind_group("bar", Property::Density)],
            },
            ParameterSpec {
                name: "i_min".into(),
                lower: 0.5 * inertia,
                upper: 1.5 * inertia,
                nominal: inertia,
                bind: vec![bind_group("bar", Property::IMin)],
            },
            ParameterSpec {
                name: "i_max".into(),
                lower: 0.5 * inertia,
                upper: 1.5 * inertia,
                nominal: inertia,
                bind: vec![bind_group("bar", Property::IMax)],
            },
        ],
        sections: BTreeMap::from([("steel_bar".to_string(), section)]),
        elements,
    };
    BeamModel::from_spec(spec).expect("bundled cantilever is valid")
}

/// Free-free aircraft-like frame, 26 nodes and 25 elements.
pub fn aircraft_frame() -> BeamModel {
    const E: f64 = 70e9;
    const NU: f64 = 0.33;
    let rho = FRAME_NOMINAL[0];

    let mut nodes: Vec<[f64; 3]> = Vec::new();
    let mut elements: Vec<ElementSpec> = Vec::new();
    let mut add_member = |nodes: &mut Vec<[f64; 3]>,
                          from: usize,
                          step: [f64; 3],
                          count: usize,
                          section: &str,
                          up: [f64; 3],
                          group: &str| {
        let mut prev = from;
        for _ in 0..count {
            let p = nodes[prev];
            nodes.push([p[0] + step[0], p[1] + step[1], p[2] + step[2]]);
            let next = nodes.len() - 1;
            elements.push(ElementSpec {
                nodes: [prev, next],
                section: section.into(),
                up,
                group: Some(group.into()),
            });
            prev = next;
        }
    };

    let z_up = [0.0, 0.0, 1.0];
    nodes.push([0.0, 0.0, 0.0]);
    // fuselage: 1.5 m along x, nodes 0..=6
    add_member(&mut nodes, 0, [0.25, 0.0, 0.0], 6, "fuselage", z_up, "fuselage");
    // wings from x = 0.5, 1.5 m each side
    add_member(&mut nodes, 2, [0.0, -0.25, 0.0], 6, "wing", z_up, "wing_left");
    add_member(&mut nodes, 2, [0.0, 0.25, 0.0], 6, "wing", z_up, "wing_right");
    // vertical tail, thin direction along global y
    add_member(&mut nodes, 6, [0.0, 0.0, 0.5 / 3.0], 3, "fin", [0.0, 1.0, 0.0], "vtp");
    // horizontal tail
    add_member(&mut nodes, 6, [0.0, -0.2, 0.0], 2, "tailplane", z_up, "htp");
    add_member(&mut nodes, 6, [0.0, 0.2, 0.0], 2, "tailplane", z_up, "htp");

    let sections = BTreeMap::from([
        (
            "fuselage".to_string(),
            MaterialSection::rectangle(E, NU, rho, 0.15, 0.05),
        ),
        (
            "wing".to_string(),
            MaterialSection::rectangle(E, NU, rho, 0.1, 0.01),
        ),
        (
            "fin".to_string(),
            MaterialSection::rectangle(E, NU, rho, 0.1, 0.01),
        ),
        (
            "tailplane".to_string(),
            MaterialSection::rectangle(E, NU, rho, 0.08, 0.008),
        ),
    ]);

    let targets: [Vec<BindingSpec>; 8] = [
        ["fuselage", "wing_left", "wing_right", "vtp", "htp"]
            .iter()
            .map(|g| bind_group(g, Property::Density))
            .collect(),
        vec![bind_group("vtp", Property::IMin)],
        vec![bind_group("wing_left", Property::IMin)],
        vec![bind_group("wing_left", Property::IMax)],
        vec![bind_group("wing_right", Property::IMin)],
        vec![bind_group("wing_right", Property::IMax)],
        vec![bind_group("wing_left", Property::Torsion)],
        vec![bind_group("wing_right", Property::Torsion)],
    ];
    let parameters = targets
        .into_iter()
        .enumerate()
        .map(|(i, bind)| ParameterSpec {
            name: FRAME_PARAMETERS[i].into(),
            lower: FRAME_LOWER[i],
            upper: FRAME_UPPER[i],
            nominal: FRAME_NOMINAL[i],
            bind,
        })
        .collect();

    let spec = ModelSpec {
        name: "aircraft_frame".into(),
        description: "free-free fuselage/wing/tail beam frame (stand-in testbed geometry)".into(),
        nodes,
        constraints: Vec::new(),
        parameters,
        sections,
        elements,
    };
    BeamModel::from_spec(spec).expect("bundled frame is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_shape() {
        let m = aircraft_frame();
        assert_eq!(m.nodes().len(), 26);
        assert_eq!(m.elements().len(), 25);
        assert_eq!(m.n_dofs(), 156);
        assert_eq!(m.parameter_space().dim(), 8);
        assert_eq!(m.nominal(), &FRAME_NOMINAL);
    }

    #[test]
    fn canonical_files_match_builders() {
        let c = BeamModel::from_toml(CANTILEVER_TOML).unwrap();
        assert_eq!(c.spec(), cantilever(20).spec());
        let f = BeamModel::from_toml(FRAME_TOML).unwrap();
        assert_eq!(f.spec(), aircraft_frame().spec());
    }

    /// Rewrites the canonical model files: `cargo test -- --ignored regenerate`.
    #[test]
    #[ignore]
    fn regenerate_model_files() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
        std::fs::write(dir.join("cantilever.toml"), cantilever(20).to_toml()).unwrap();
        std::fs::write(dir.join("frame.toml"), aircraft_frame().to_toml()).unwrap();
    }
}
