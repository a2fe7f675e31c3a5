//! Capacitance networks, Maxwell matrices and the charging/coupling energies
//! they imply.
//!
//! A network is a list of circuit elements (grounded: one metal plate,
//! floating: two plates) plus self and mutual capacitances between plates.
//! Energies are obtained by transforming the Maxwell matrix to junction
//! (Δ) and auxiliary (Σ) coordinates, inverting, and reading off Δ entries.

mod closed_form;
mod energies;
mod file;
mod maxwell;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QcqError, Result};

pub use closed_form::{
    check_fgf_longrange_a, closed_form_ggg, fgf_long_range, gfg_long_range, ggg_symmetric,
    ClosedFormGgg, FgfCaps, GfgCaps, GggCaps,
};
pub use energies::{extract_energies, invert_checked, EnergySet, QcqEnergies, CONDITION_LIMIT};
pub use file::{ElementEntry, MutualEntry, NetworkFile};
pub use maxwell::{build_maxwell, flip_node_sign, MaxwellMatrix};
pub use transform::{build_transform, ModeKind, ModeLabel, TransformMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementKind {
    #[serde(rename = "G")]
    Grounded,
    #[serde(rename = "F")]
    Floating,
}

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Grounded => 1,
            ElementKind::Floating => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Qubit,
    Coupler,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: String,
    pub kind: ElementKind,
    pub role: Option<Role>,
}

impl Element {
    pub fn grounded(id: &str) -> Self {
        Self {
            id: id.to_string(),
            kind: ElementKind::Grounded,
            role: None,
        }
    }

    pub fn floating(id: &str) -> Self {
        Self {
            id: id.to_string(),
            kind: ElementKind::Floating,
            role: None,
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = Some(role);
        self
    }
}

/// Element indices of the two qubits and the coupler in a QCQ circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcqRoles {
    pub qubit1: usize,
    pub coupler: usize,
    pub qubit2: usize,
}

/// Ordered elements and the plate (node) layout they induce.
///
/// Nodes are numbered in element declaration order; a floating element
/// contributes `<id>.1` then `<id>.2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementTopology {
    elements: Vec<Element>,
    node_names: Vec<String>,
    node_element: Vec<usize>,
    first_node: Vec<usize>,
}

impl ElementTopology {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(QcqError::InvalidTopology("no elements".into()));
        }
        let mut node_names = Vec::new();
        let mut node_element = Vec::new();
        let mut first_node = Vec::with_capacity(elements.len());
        for (i, el) in elements.iter().enumerate() {
            if el.id.is_empty() || el.id.contains('.') {
                return Err(QcqError::InvalidTopology(format!(
                    "element id `{}` must be non-empty and contain no '.'",
                    el.id
                )));
            }
            if elements[..i].iter().any(|other| other.id == el.id) {
                return Err(QcqError::InvalidTopology(format!(
                    "duplicate element id `{}`",
                    el.id
                )));
            }
            first_node.push(node_names.len());
            match el.kind {
                ElementKind::Grounded => node_names.push(el.id.clone()),
                ElementKind::Floating => {
                    node_names.push(format!("{}.1", el.id));
                    node_names.push(format!("{}.2", el.id));
                }
            }
            node_element.extend(std::iter::repeat(i).take(el.kind.node_count()));
        }
        let topo = Self {
            elements,
            node_names,
            node_element,
            first_node,
        };
        let qubits = topo.count_role(Role::Qubit);
        let couplers = topo.count_role(Role::Coupler);
        if qubits + couplers > 0 && (qubits != 2 || couplers != 1) {
            return Err(QcqError::InvalidTopology(format!(
                "roles must tag exactly two qubits and one coupler (got {qubits} qubits, {couplers} couplers)"
            )));
        }
        Ok(topo)
    }

    fn count_role(&self, role: Role) -> usize {
        self.elements
            .iter()
            .filter(|e| e.role == Some(role))
            .count()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.node_names.iter().position(|n| n == name)
    }

    pub fn element_index(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.id == id)
    }

    /// Element owning a node.
    pub fn element_of_node(&self, node: usize) -> usize {
        self.node_element[node]
    }

    /// Node indices belonging to an element.
    pub fn element_nodes(&self, element: usize) -> std::ops::Range<usize> {
        let start = self.first_node[element];
        start..start + self.elements[element].kind.node_count()
    }

    /// Qubit/coupler assignment. Explicit roles win; otherwise a three-element
    /// topology is read as (qubit, coupler, qubit) in declaration order.
    pub fn qcq_roles(&self) -> Result<QcqRoles> {
        if self.count_role(Role::Coupler) == 1 {
            let coupler = self
                .elements
                .iter()
                .position(|e| e.role == Some(Role::Coupler))
                .expect("counted");
            let mut qubits = self
                .elements
                .iter()
                .enumerate()
                .filter(|(_, e)| e.role == Some(Role::Qubit))
                .map(|(i, _)| i);
            let qubit1 = qubits.next().expect("validated");
            let qubit2 = qubits.next().expect("validated");
            return Ok(QcqRoles {
                qubit1,
                coupler,
                qubit2,
            });
        }
        if self.elements.len() == 3 {
            return Ok(QcqRoles {
                qubit1: 0,
                coupler: 1,
                qubit2: 2,
            });
        }
        Err(QcqError::InvalidTopology(
            "QCQ analysis needs two qubits and one coupler".into(),
        ))
    }
}

/// Flux sign convention of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeSign {
    #[default]
    Positive,
    Negative,
}

impl NodeSign {
    pub fn value(self) -> f64 {
        match self {
            NodeSign::Positive => 1.0,
            NodeSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            NodeSign::Positive => NodeSign::Negative,
            NodeSign::Negative => NodeSign::Positive,
        }
    }

    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            1 => Some(NodeSign::Positive),
            -1 => Some(NodeSign::Negative),
            _ => None,
        }
    }
}

/// Capacitances (fF) attached to a topology. Missing mutual pairs are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitanceNetwork {
    topology: ElementTopology,
    self_caps: Vec<f64>,
    mutual_caps: BTreeMap<(usize, usize), f64>,
    node_signs: Vec<NodeSign>,
}

fn check_capacitance(what: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(QcqError::InvalidNetwork(format!(
            "{what} must be a finite non-negative capacitance, got {value}"
        )));
    }
    Ok(())
}

impl CapacitanceNetwork {
    pub fn new(topology: ElementTopology) -> Self {
        let n = topology.node_count();
        Self {
            topology,
            self_caps: vec![0.0; n],
            mutual_caps: BTreeMap::new(),
            node_signs: vec![NodeSign::Positive; n],
        }
    }

    pub fn topology(&self) -> &ElementTopology {
        &self.topology
    }

    fn node(&self, name: &str) -> Result<usize> {
        self.topology
            .node_index(name)
            .ok_or_else(|| QcqError::UnknownNode(name.to_string()))
    }

    pub fn set_self_cap(&mut self, node: &str, value: f64) -> Result<()> {
        check_capacitance(&format!("self capacitance of `{node}`"), value)?;
        let i = self.node(node)?;
        self.self_caps[i] = value;
        Ok(())
    }

    pub fn set_mutual_cap(&mut self, a: &str, b: &str, value: f64) -> Result<()> {
        check_capacitance(&format!("mutual capacitance `{a}`-`{b}`"), value)?;
        let (i, j) = (self.node(a)?, self.node(b)?);
        if i == j {
            return Err(QcqError::InvalidNetwork(format!(
                "mutual capacitance from `{a}` to itself"
            )));
        }
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.mutual_caps.remove(&key);
        } else {
            self.mutual_caps.insert(key, value);
        }
        Ok(())
    }

    pub fn with_self_cap(mut self, node: &str, value: f64) -> Result<Self> {
        self.set_self_cap(node, value)?;
        Ok(self)
    }

    pub fn with_mutual_cap(mut self, a: &str, b: &str, value: f64) -> Result<Self> {
        self.set_mutual_cap(a, b, value)?;
        Ok(self)
    }

    pub fn set_node_sign(&mut self, node: &str, sign: NodeSign) -> Result<()> {
        let i = self.node(node)?;
        self.node_signs[i] = sign;
        Ok(())
    }

    pub fn self_cap(&self, node: usize) -> f64 {
        self.self_caps[node]
    }

    pub fn mutual_cap(&self, a: usize, b: usize) -> f64 {
        self.mutual_caps
            .get(&(a.min(b), a.max(b)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Non-zero mutual capacitances as (node, node, value) with node a < b.
    pub fn mutual_caps(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.mutual_caps.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    pub fn node_sign(&self, node: usize) -> NodeSign {
        self.node_signs[node]
    }

    pub fn node_signs(&self) -> &[NodeSign] {
        &self.node_signs
    }

    /// Every capacitance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(QcqError::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let mut out = self.clone();
        out.self_caps.iter_mut().for_each(|c| *c *= factor);
        out.mutual_caps.values_mut().for_each(|c| *c *= factor);
        Ok(out)
    }
}

impl fmt::Display for CapacitanceNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.topology.node_names();
        for (i, name) in names.iter().enumerate() {
            writeln!(f, "C0[{name}] = {} fF", self.self_caps[i])?;
        }
        for (a, b, v) in self.mutual_caps() {
            writeln!(f, "C[{}, {}] = {v} fF", names[a], names[b])?;
        }
        Ok(())
    }
}
