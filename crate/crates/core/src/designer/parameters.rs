//! Networks whose capacitances are tied to a short list of named parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::capnet::{
    CapacitanceNetwork, Element, ElementEntry, ElementTopology, NetworkFile, NodeSign, Role,
};
use crate::error::{QcqError, Result};

/// A self capacitance (`"q1"`) or a mutual (`["q1", "c"]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapSlot {
    Node(String),
    Pair([String; 2]),
}

impl CapSlot {
    fn matches(&self, other: &CapSlot) -> bool {
        match (self, other) {
            (CapSlot::Node(a), CapSlot::Node(b)) => a == b,
            (CapSlot::Pair([a, b]), CapSlot::Pair([c, d])) => {
                (a == c && b == d) || (a == d && b == c)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapParameter {
    pub name: String,
    pub slots: Vec<CapSlot>,
}

impl CapParameter {
    fn new(name: &str, slots: Vec<CapSlot>) -> Self {
        Self {
            name: name.to_string(),
            slots,
        }
    }
}

fn node(n: &str) -> CapSlot {
    CapSlot::Node(n.to_string())
}

fn pair(a: &str, b: &str) -> CapSlot {
    CapSlot::Pair([a.to_string(), b.to_string()])
}

/// Which physical role a parameter plays; drives the solver's starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterKind {
    QubitSelf,
    CouplerSelf,
    Mutual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedNetwork {
    topology: ElementTopology,
    node_signs: BTreeMap<String, NodeSign>,
    parameters: Vec<CapParameter>,
}

pub const PRESETS: [&str; 2] = ["ggg_symmetric", "gfg_long_range"];

impl ParameterizedNetwork {
    pub fn new(
        topology: ElementTopology,
        parameters: Vec<CapParameter>,
        node_signs: BTreeMap<String, NodeSign>,
    ) -> Result<Self> {
        let mut seen: Vec<&CapSlot> = Vec::new();
        for (i, p) in parameters.iter().enumerate() {
            if parameters[..i].iter().any(|q| q.name == p.name) {
                return Err(QcqError::InvalidTopology(format!(
                    "duplicate parameter `{}`",
                    p.name
                )));
            }
            if p.slots.is_empty() {
                return Err(QcqError::InvalidTopology(format!(
                    "parameter `{}` has no capacitances",
                    p.name
                )));
            }
            for s in &p.slots {
                let names: Vec<&String> = match s {
                    CapSlot::Node(n) => vec![n],
                    CapSlot::Pair([a, b]) => {
                        if a == b {
                            return Err(QcqError::InvalidTopology(format!(
                                "parameter `{}` couples `{a}` to itself",
                                p.name
                            )));
                        }
                        vec![a, b]
                    }
                };
                for n in names {
                    if topology.node_index(n).is_none() {
                        return Err(QcqError::UnknownNode(n.clone()));
                    }
                }
                if seen.iter().any(|t| t.matches(s)) {
                    return Err(QcqError::InvalidTopology(format!(
                        "capacitance {s:?} assigned to more than one parameter"
                    )));
                }
                seen.push(s);
            }
        }
        for n in topology.node_names() {
            if !seen.iter().any(|s| s.matches(&CapSlot::Node(n.clone()))) {
                return Err(QcqError::InvalidTopology(format!(
                    "self capacitance of `{n}` is not covered by any parameter"
                )));
            }
        }
        for n in node_signs.keys() {
            if topology.node_index(n).is_none() {
                return Err(QcqError::UnknownNode(n.clone()));
            }
        }
        topology.qcq_roles()?;
        Ok(Self {
            topology,
            node_signs,
            parameters,
        })
    }

    /// Symmetric G-G-G: `c0q`, `c0c`, `cqc`, `cqq`.
    pub fn ggg_symmetric() -> Self {
        let topology = qcq_topology(Element::grounded, Element::grounded);
        Self::new(
            topology,
            vec![
                CapParameter::new("c0q", vec![node("q1"), node("q2")]),
                CapParameter::new("c0c", vec![node("c")]),
                CapParameter::new("cqc", vec![pair("q1", "c"), pair("q2", "c")]),
                CapParameter::new("cqq", vec![pair("q1", "q2")]),
            ],
            BTreeMap::new(),
        )
        .expect("static preset")
    }

    /// Long-range G-F-G: `c12`, `c1q`, `c2q`, `c0q`, `c01`, `c02`.
    pub fn gfg_long_range() -> Self {
        let topology = qcq_topology(Element::grounded, Element::floating);
        Self::new(
            topology,
            vec![
                CapParameter::new("c12", vec![pair("c.1", "c.2")]),
                CapParameter::new("c1q", vec![pair("q1", "c.1"), pair("q2", "c.1")]),
                CapParameter::new("c2q", vec![pair("q1", "c.2"), pair("q2", "c.2")]),
                CapParameter::new("c0q", vec![node("q1"), node("q2")]),
                CapParameter::new("c01", vec![node("c.1")]),
                CapParameter::new("c02", vec![node("c.2")]),
            ],
            BTreeMap::new(),
        )
        .expect("static preset")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "ggg_symmetric" => Ok(Self::ggg_symmetric()),
            "gfg_long_range" => Ok(Self::gfg_long_range()),
            other => Err(QcqError::UnknownStrategy {
                name: other.to_string(),
                available: PRESETS.join(", "),
            }),
        }
    }

    pub fn with_node_signs(mut self, signs: BTreeMap<String, NodeSign>) -> Result<Self> {
        for n in signs.keys() {
            if self.topology.node_index(n).is_none() {
                return Err(QcqError::UnknownNode(n.clone()));
            }
        }
        self.node_signs = signs;
        Ok(self)
    }

    pub fn topology(&self) -> &ElementTopology {
        &self.topology
    }

    pub fn parameters(&self) -> &[CapParameter] {
        &self.parameters
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p.name == name)
    }

    /// Parameter that owns the given capacitance.
    pub fn parameter_of_slot(&self, slot: &CapSlot) -> Option<usize> {
        self.parameters
            .iter()
            .position(|p| p.slots.iter().any(|s| s.matches(slot)))
    }

    pub fn kind(&self, index: usize) -> ParameterKind {
        let roles = self.topology.qcq_roles().expect("validated");
        let p = &self.parameters[index];
        match &p.slots[0] {
            CapSlot::Pair(_) => ParameterKind::Mutual,
            CapSlot::Node(n) => {
                let node = self.topology.node_index(n).expect("validated");
                if self.topology.element_of_node(node) == roles.coupler {
                    ParameterKind::CouplerSelf
                } else {
                    ParameterKind::QubitSelf
                }
            }
        }
    }

    /// Whether any capacitance of parameter `index` touches a qubit node.
    pub fn touches_qubit(&self, index: usize) -> bool {
        let roles = self.topology.qcq_roles().expect("validated");
        let is_qubit = |n: &String| {
            let e = self
                .topology
                .element_of_node(self.topology.node_index(n).expect("validated"));
            e == roles.qubit1 || e == roles.qubit2
        };
        self.parameters[index].slots.iter().any(|s| match s {
            CapSlot::Node(n) => is_qubit(n),
            CapSlot::Pair([a, b]) => is_qubit(a) || is_qubit(b),
        })
    }

    pub fn build(&self, values: &[f64]) -> Result<CapacitanceNetwork> {
        if values.len() != self.parameters.len() {
            return Err(QcqError::InvalidParameter(format!(
                "expected {} parameter values, got {}",
                self.parameters.len(),
                values.len()
            )));
        }
        let mut net = CapacitanceNetwork::new(self.topology.clone());
        for (p, &v) in self.parameters.iter().zip(values) {
            for s in &p.slots {
                match s {
                    CapSlot::Node(n) => net.set_self_cap(n, v)?,
                    CapSlot::Pair([a, b]) => net.set_mutual_cap(a, b, v)?,
                }
            }
        }
        for (n, &s) in &self.node_signs {
            net.set_node_sign(n, s)?;
        }
        Ok(net)
    }
}

fn qcq_topology(qubit: fn(&str) -> Element, coupler: fn(&str) -> Element) -> ElementTopology {
    ElementTopology::new(vec![
        qubit("q1").with_role(Role::Qubit),
        coupler("c").with_role(Role::Coupler),
        qubit("q2").with_role(Role::Qubit),
    ])
    .expect("static topology")
}

/// Topology section of a design file: a preset name or explicit elements
/// with their parameters, plus optional node signs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<CapParameter>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub node_signs: BTreeMap<String, i64>,
}

impl TopologySpec {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn resolve(&self) -> Result<ParameterizedNetwork> {
        let mut signs = BTreeMap::new();
        for (n, &s) in &self.node_signs {
            let sign = NodeSign::from_int(s).ok_or_else(|| {
                QcqError::Parse(format!("node sign of `{n}` must be +1 or -1, got {s}"))
            })?;
            signs.insert(n.clone(), sign);
        }
        match (&self.preset, &self.elements, &self.parameters) {
            (Some(name), None, None) => ParameterizedNetwork::preset(name)?.with_node_signs(signs),
            (None, Some(elements), Some(parameters)) => {
                let topology = ElementTopology::new(
                    elements
                        .iter()
                        .map(|e| Element {
                            id: e.id.clone(),
                            kind: e.kind,
                            role: e.role,
                        })
                        .collect(),
                )?;
                ParameterizedNetwork::new(topology, parameters.clone(), signs)
            }
            _ => Err(QcqError::Parse(
                "topology needs either `preset` or both `elements` and `parameters`".into(),
            )),
        }
    }
}

/// Network file for a solved parameter vector.
pub fn network_file(p: &ParameterizedNetwork, values: &[f64]) -> Result<NetworkFile> {
    Ok(NetworkFile::from_network(&p.build(values)?))
}
