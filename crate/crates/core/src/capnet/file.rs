//! JSON network definition files.
//!
//! ```json
//! {
//!   "elements": [{"id": "q1", "type": "G"}, {"id": "c", "type": "F"}, {"id": "q2", "type": "G"}],
//!   "self_caps_fF": {"q1": 71.9, "c.1": 266.3, "c.2": 840.1, "q2": 71.9},
//!   "mutual_caps_fF": [{"a": "q1", "b": "c.1", "value": 10.4}],
//!   "node_signs": {"q1": -1}
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CapacitanceNetwork, Element, ElementKind, ElementTopology, NodeSign, Role};
use crate::error::{QcqError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: ElementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutualEntry {
    pub a: String,
    pub b: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub elements: Vec<ElementEntry>,
    #[serde(rename = "self_caps_fF")]
    pub self_caps: BTreeMap<String, f64>,
    #[serde(rename = "mutual_caps_fF", default)]
    pub mutual_caps: Vec<MutualEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub node_signs: BTreeMap<String, i64>,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| QcqError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_network(&self) -> Result<CapacitanceNetwork> {
        if let Some(v) = self.schema_version {
            if v != 1 {
                return Err(QcqError::Parse(format!("unsupported schema_version {v}")));
            }
        }
        let topology = ElementTopology::new(
            self.elements
                .iter()
                .map(|e| Element {
                    id: e.id.clone(),
                    kind: e.kind,
                    role: e.role,
                })
                .collect(),
        )?;
        let mut net = CapacitanceNetwork::new(topology);
        for (node, &v) in &self.self_caps {
            net.set_self_cap(node, v)?;
        }
        for m in &self.mutual_caps {
            if net.topology().node_index(&m.a) == net.topology().node_index(&m.b) {
                return Err(QcqError::InvalidNetwork(format!(
                    "mutual capacitance from `{}` to itself",
                    m.a
                )));
            }
            let (a, b) = (
                net.topology()
                    .node_index(&m.a)
                    .ok_or_else(|| QcqError::UnknownNode(m.a.clone()))?,
                net.topology()
                    .node_index(&m.b)
                    .ok_or_else(|| QcqError::UnknownNode(m.b.clone()))?,
            );
            if net.mutual_cap(a, b) != 0.0 {
                return Err(QcqError::InvalidNetwork(format!(
                    "mutual capacitance `{}`-`{}` listed twice",
                    m.a, m.b
                )));
            }
            net.set_mutual_cap(&m.a, &m.b, m.value)?;
        }
        for (node, &s) in &self.node_signs {
            let sign = NodeSign::from_int(s).ok_or_else(|| {
                QcqError::Parse(format!("node sign of `{node}` must be +1 or -1, got {s}"))
            })?;
            net.set_node_sign(node, sign)?;
        }
        Ok(net)
    }

    pub fn from_network(net: &CapacitanceNetwork) -> Self {
        let topo = net.topology();
        let names = topo.node_names();
        NetworkFile {
            schema_version: Some(1),
            elements: topo
                .elements()
                .iter()
                .map(|e| ElementEntry {
                    id: e.id.clone(),
                    kind: e.kind,
                    role: e.role,
                })
                .collect(),
            self_caps: names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), net.self_cap(i)))
                .collect(),
            mutual_caps: net
                .mutual_caps()
                .map(|(a, b, value)| MutualEntry {
                    a: names[a].clone(),
                    b: names[b].clone(),
                    value,
                })
                .collect(),
            node_signs: names
                .iter()
                .enumerate()
                .filter(|&(i, _)| net.node_sign(i) == NodeSign::Negative)
                .map(|(_, n)| (n.clone(), -1))
                .collect(),
        }
    }
}
