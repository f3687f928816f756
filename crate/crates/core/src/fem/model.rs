//! Beam-structure description and its on-disk (TOML) schema.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::element::Triad;
use super::section::{MaterialSection, Property};
use crate::error::{Error, Result};
use crate::params::ParameterSpace;

pub const DOF_PER_NODE: usize = 6;

fn default_up() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn all_dofs() -> Vec<usize> {
    (0..DOF_PER_NODE).collect()
}

fn is_default_up(up: &[f64; 3]) -> bool {
    *up == default_up()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub nodes: [usize; 2],
    pub section: String,
    /// Reference vector for local z.
    #[serde(default = "default_up", skip_serializing_if = "is_default_up")]
    pub up: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub node: usize,
    /// Local DOF indices `0..6` (`ux uy uz rx ry rz`); all six if omitted.
    #[serde(default = "all_dofs")]
    pub dofs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingSpec {
    /// Element group to override; mutually exclusive with `elements`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<usize>,
    pub property: Property,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub nominal: f64,
    pub bind: Vec<BindingSpec>,
}

/// Serialized form of a [`BeamModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub nodes: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<ParameterSpec>,
    pub sections: BTreeMap<String, MaterialSection>,
    pub elements: Vec<ElementSpec>,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub nodes: [usize; 2],
    pub section: usize,
    pub triad: Triad,
    pub length: f64,
}

/// A validated beam structure with its updating-parameter bindings.
#[derive(Debug, Clone)]
pub struct BeamModel {
    spec: ModelSpec,
    sections: Vec<MaterialSection>,
    elements: Vec<Element>,
    constrained: BTreeSet<usize>,
    bindings: Vec<Vec<(usize, Property)>>,
    space: ParameterSpace,
    nominal: Vec<f64>,
    natural: DofLayout,
    banded: DofLayout,
}

/// Map from global DOF (`6·node + local`) to a reduced index, with
/// constrained DOFs removed.
#[derive(Debug, Clone)]
pub struct DofLayout {
    pub index: Vec<Option<usize>>,
    pub size: usize,
    /// Largest `|i - j|` over DOF pairs coupled by an element.
    pub half_bandwidth: usize,
}

impl DofLayout {
    fn build(node_order: &[usize], constrained: &BTreeSet<usize>, elements: &[Element]) -> Self {
        let n_nodes = node_order.len();
        let mut index = vec![None; n_nodes * DOF_PER_NODE];
        let mut next = 0;
        for &node in node_order {
            for d in 0..DOF_PER_NODE {
                let g = node * DOF_PER_NODE + d;
                if !constrained.contains(&g) {
                    index[g] = Some(next);
                    next += 1;
                }
            }
        }
        let mut half_bandwidth = 0;
        for e in elements {
            let dofs: Vec<usize> = e
                .nodes
                .iter()
                .flat_map(|&n| (0..DOF_PER_NODE).map(move |d| n * DOF_PER_NODE + d))
                .filter_map(|g| index[g])
                .collect();
            if let (Some(lo), Some(hi)) = (dofs.iter().min(), dofs.iter().max()) {
                half_bandwidth = half_bandwidth.max(hi - lo);
            }
        }
        Self {
            index,
            size: next,
            half_bandwidth,
        }
    }

    /// Reduced indices of an element's 12 DOFs.
    pub fn element_dofs(&self, e: &Element) -> [Option<usize>; 12] {
        let mut out = [None; 12];
        for (k, &node) in e.nodes.iter().enumerate() {
            for d in 0..DOF_PER_NODE {
                out[k * DOF_PER_NODE + d] = self.index[node * DOF_PER_NODE + d];
            }
        }
        out
    }
}

/// Reverse Cuthill-McKee ordering of the node graph.
fn reverse_cuthill_mckee(n_nodes: usize, elements: &[Element]) -> Vec<usize> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_nodes];
    for e in elements {
        let [a, b] = e.nodes;
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut visited = vec![false; n_nodes];
    let mut order = Vec::with_capacity(n_nodes);
    while order.len() < n_nodes {
        // start each component from a minimum-degree node
        let start = (0..n_nodes)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (adj[i].len(), i))
            .expect("an unvisited node remains");
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (adj[u].len(), u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

impl BeamModel {
    pub fn from_spec(spec: ModelSpec) -> Result<Self> {
        if spec.nodes.is_empty() {
            return Err(Error::InvalidGeometry("model has no nodes".into()));
        }
        if spec.elements.is_empty() {
            return Err(Error::InvalidGeometry("model has no elements".into()));
        }
        if spec.nodes.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("node coordinates must be finite".into()));
        }

        let section_ids: Vec<&String> = spec.sections.keys().collect();
        let mut sections = Vec::with_capacity(section_ids.len());
        for (id, s) in &spec.sections {
            s.validate()
                .map_err(|e| Error::InvalidGeometry(format!("section `{id}`: {e}")))?;
            sections.push(*s);
        }

        let n_nodes = spec.nodes.len();
        let mut elements = Vec::with_capacity(spec.elements.len());
        for (k, e) in spec.elements.iter().enumerate() {
            let [a, b] = e.nodes;
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::InvalidGeometry(format!(
                    "element {k} references node outside 0..{n_nodes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGeometry(format!(
                    "element {k} connects node {a} to itself"
                )));
            }
            let section = section_ids
                .iter()
                .position(|id| **id == e.section)
                .ok_or_else(|| {
                    Error::Config(format!("element {k} uses unknown section `{}`", e.section))
                })?;
            let (triad, length) = Triad::from_nodes(spec.nodes[a], spec.nodes[b], e.up)
                .map_err(|err| Error::InvalidGeometry(format!("element {k}: {err}")))?;
            elements.push(Element {
                nodes: e.nodes,
                section,
                triad,
                length,
            });
        }

        let mut constrained = BTreeSet::new();
        for c in &spec.constraints {
            if c.node >= n_nodes {
                return Err(Error::Config(format!(
                    "constraint references node {} outside 0..{n_nodes}",
                    c.node
                )));
            }
            for &d in &c.dofs {
                if d >= DOF_PER_NODE {
                    return Err(Error::Config(format!("constraint DOF {d} is not in 0..6")));
                }
                constrained.insert(c.node * DOF_PER_NODE + d);
            }
        }

        let mut bindings = Vec::with_capacity(spec.parameters.len());
        let mut names = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut nominal = Vec::new();
        for p in &spec.parameters {
            let mut targets = Vec::new();
            for b in &p.bind {
                let ids: Vec<usize> = match (&b.group, b.elements.is_empty()) {
                    (Some(g), true) => {
                        let ids: Vec<usize> = spec
                            .elements
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| e.group.as_deref() == Some(g.as_str()))
                            .map(|(i, _)| i)
                            .collect();
                        if ids.is_empty() {
                            return Err(Error::Config(format!(
                                "parameter `{}` binds empty group `{g}`",
                                p.name
                            )));
                        }
                        ids
                    }
                    (None, false) => b.elements.clone(),
                    _ => {
                        return Err(Error::Config(format!(
                            "parameter `{}`: each binding needs exactly one of `group` or `elements`",
                            p.name
                        )))
                    }
                };
                for id in ids {
                    if id >= elements.len() {
                        return Err(Error::Config(format!(
                            "parameter `{}` binds missing element {id}",
                            p.name
                        )));
                    }
                    targets.push((id, b.property));
                }
            }
            if targets.is_empty() {
                return Err(Error::Config(format!("parameter `{}` has no bindings", p.name)));
            }
            names.push(p.name.clone());
            lower.push(p.lower);
            upper.push(p.upper);
            nominal.push(p.nominal);
            bindings.push(targets);
        }
        let space = ParameterSpace::new(names, lower, upper)?;
        space
            .check(&nominal)
            .map_err(|e| Error::Config(format!("nominal updating vector: {e}")))?;

        let identity: Vec<usize> = (0..n_nodes).collect();
        let natural = DofLayout::build(&identity, &constrained, &elements);
        let banded = DofLayout::build(
            &reverse_cuthill_mckee(n_nodes, &elements),
            &constrained,
            &elements,
        );

        Ok(Self {
            spec,
            sections,
            elements,
            constrained,
            bindings,
            space,
            nominal,
            natural,
            banded,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ModelSpec = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<model>".into(),
            message: e.to_string(),
        })?;
        Self::from_spec(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.spec).expect("model spec serializes")
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.spec.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn constrained_dofs(&self) -> &BTreeSet<usize> {
        &self.constrained
    }

    pub fn parameter_space(&self) -> &ParameterSpace {
        &self.space
    }

    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    /// θ component index → (element, property) overrides.
    pub fn bindings(&self) -> &[Vec<(usize, Property)>] {
        &self.bindings
    }

    /// Free DOFs in natural node order.
    pub fn dof_layout(&self) -> &DofLayout {
        &self.natural
    }

    /// Free DOFs in bandwidth-reducing order.
    pub fn banded_layout(&self) -> &DofLayout {
        &self.banded
    }

    pub fn n_dofs(&self) -> usize {
        self.natural.size
    }

    /// Per-element sections after applying θ overrides.
    pub fn element_sections(&self, theta: &[f64]) -> Result<Vec<MaterialSection>> {
        if theta.len() != self.bindings.len() {
            return Err(Error::shape("updating vector", self.bindings.len(), theta.len()));
        }
        let mut out: Vec<MaterialSection> = self
            .elements
            .iter()
            .map(|e| self.sections[e.section])
            .collect();
        for (value, targets) in theta.iter().zip(&self.bindings) {
            for &(element, property) in targets {
                out[element].set(property, *value);
            }
        }
        Ok(out)
    }

    /// Rigid-body motions of the whole structure that are compatible with the
    /// constraints, expressed in `layout` order (one column each).
    pub fn rigid_body_modes(&self, layout: &DofLayout) -> Vec<Vec<f64>> {
        let n_nodes = self.spec.nodes.len();
        let centroid = self.spec.nodes.iter().fold([0.0; 3], |mut acc, p| {
            for k in 0..3 {
                acc[k] += p[k] / n_nodes as f64;
            }
            acc
        });
        // six generators over all global DOFs
        let full: Vec<Vec<f64>> = (0..6)
            .map(|k| {
                let mut v = vec![0.0; n_nodes * DOF_PER_NODE];
                for (node, p) in self.spec.nodes.iter().enumerate() {
                    let base = node * DOF_PER_NODE;
                    if k < 3 {
                        v[base + k] = 1.0;
                    } else {
                        let axis = k - 3;
                        let r = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
                        let mut e = [0.0; 3];
                        e[axis] = 1.0;
                        let u = [
                            e[1] * r[2] - e[2] * r[1],
                            e[2] * r[0] - e[0] * r[2],
                            e[0] * r[1] - e[1] * r[0],
                        ];
                        v[base..base + 3].copy_from_slice(&u);
                        v[base + 3 + axis] = 1.0;
                    }
                }
                v
            })
            .collect();

        // combinations vanishing on constrained DOFs
        let mut gram = nalgebra::DMatrix::<f64>::zeros(6, 6);
        for &g in &self.constrained {
            for a in 0..6 {
                for b in 0..6 {
                    gram[(a, b)] += full[a][g] * full[b][g];
                }
            }
        }
        let combos: Vec<nalgebra::DVector<f64>> = if self.constrained.is_empty() {
            (0..6)
                .map(|k| nalgebra::DVector::from_fn(6, |i, _| if i == k { 1.0 } else { 0.0 }))
                .collect()
        } else {
            let eig = gram.clone().symmetric_eigen();
            let scale = gram.diagonal().max().max(1.0);
            (0..6)
                .filter(|&k| eig.eigenvalues[k].abs() <= 1e-10 * scale)
                .map(|k| eig.eigenvectors.column(k).into_owned())
                .collect()
        };

        combos
            .into_iter()
            .map(|c| {
                let mut v = vec![0.0; layout.size];
                for (g, slot) in layout.index.iter().enumerate() {
                    if let Some(i) = slot {
                        v[*i] = (0..6).map(|k| c[k] * full[k][g]).sum();
                    }
                }
                v
            })
            .collect()
    }
}
