use nalgebra::DMatrix;

use super::{CapacitanceNetwork, NodeSign};
use crate::error::{QcqError, Result};

/// Node-indexed Maxwell capacitance matrix in fF.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellMatrix(DMatrix<f64>);

impl MaxwellMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Diagonal: self capacitance plus all mutuals of the node. Off-diagonal:
/// minus the mutual capacitance, with the sign flipped once per negatively
/// oriented element in the pair. A floating element is oriented by the
/// product of its plate signs, so flipping either plate reverses the whole
/// element and both of its modes.
pub fn build_maxwell(network: &CapacitanceNetwork) -> Result<MaxwellMatrix> {
    let topology = network.topology();
    let n = topology.node_count();
    let orientation: Vec<f64> = (0..n)
        .map(|i| {
            topology
                .element_nodes(topology.element_of_node(i))
                .map(|j| network.node_sign(j).value())
                .product()
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = network.self_cap(i);
    }
    for (a, b, c) in network.mutual_caps() {
        let s = orientation[a] * orientation[b];
        m[(a, a)] += c;
        m[(b, b)] += c;
        m[(a, b)] -= s * c;
        m[(b, a)] -= s * c;
    }
    for i in 0..n {
        if m[(i, i)] <= 0.0 {
            return Err(QcqError::InvalidNetwork(format!(
                "node `{}` has no capacitance",
                network.topology().node_names()[i]
            )));
        }
    }
    Ok(MaxwellMatrix(m))
}

/// Redefine the flux of `node` as its negative.
pub fn flip_node_sign(network: &CapacitanceNetwork, node: &str) -> Result<CapacitanceNetwork> {
    let i = network
        .topology()
        .node_index(node)
        .ok_or_else(|| QcqError::UnknownNode(node.to_string()))?;
    let mut out = network.clone();
    let flipped: NodeSign = network.node_sign(i).flipped();
    out.set_node_sign(node, flipped)?;
    Ok(out)
}
