use nalgebra::DMatrix;

use super::{ElementKind, ElementTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Junction flux: the only coordinate carrying Josephson energy.
    Delta,
    /// Auxiliary common-mode flux of a floating element.
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLabel {
    pub element: usize,
    pub kind: ModeKind,
}

/// Node fluxes = S · mode fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    matrix: DMatrix<f64>,
    modes: Vec<ModeLabel>,
}

impl TransformMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    /// Column of the Δ mode belonging to `element`.
    pub fn delta_index(&self, element: usize) -> usize {
        self.modes
            .iter()
            .position(|m| m.element == element && m.kind == ModeKind::Delta)
            .expect("every element has a delta mode")
    }
}

/// Grounded elements map their node straight to a Δ column. A floating
/// element with plates (p1, p2) gets a Σ column then a Δ column with
/// p1 = (Σ + Δ)/2 and p2 = (Σ − Δ)/2.
pub fn build_transform(topology: &ElementTopology) -> TransformMatrix {
    let n = topology.node_count();
    let mut matrix = DMatrix::zeros(n, n);
    let mut modes = Vec::with_capacity(n);
    for (e, el) in topology.elements().iter().enumerate() {
        let nodes = topology.element_nodes(e);
        match el.kind {
            ElementKind::Grounded => {
                let col = modes.len();
                matrix[(nodes.start, col)] = 1.0;
                modes.push(ModeLabel {
                    element: e,
                    kind: ModeKind::Delta,
                });
            }
            ElementKind::Floating => {
                let (p1, p2) = (nodes.start, nodes.start + 1);
                let sigma = modes.len();
                let delta = sigma + 1;
                matrix[(p1, sigma)] = 0.5;
                matrix[(p2, sigma)] = 0.5;
                matrix[(p1, delta)] = 0.5;
                matrix[(p2, delta)] = -0.5;
                modes.push(ModeLabel {
                    element: e,
                    kind: ModeKind::Sigma,
                });
                modes.push(ModeLabel {
                    element: e,
                    kind: ModeKind::Delta,
                });
            }
        }
    }
    TransformMatrix { matrix, modes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capnet::Element;

    fn topo(kinds: &[(&str, bool)]) -> ElementTopology {
        ElementTopology::new(
            kinds
                .iter()
                .map(|&(id, floating)| {
                    if floating {
                        Element::floating(id)
                    } else {
                        Element::grounded(id)
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ggg_is_identity() {
        let s = build_transform(&topo(&[("q1", false), ("c", false), ("q2", false)]));
        assert_eq!(s.matrix(), &DMatrix::identity(3, 3));
        assert!(s.modes().iter().all(|m| m.kind == ModeKind::Delta));
    }

    #[test]
    fn gfg_block() {
        let s = build_transform(&topo(&[("q1", false), ("c", true), ("q2", false)]));
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.5, 0.5, 0.0, //
                0.0, 0.5, -0.5, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        );
        assert_eq!(s.matrix(), &expected);
        assert_eq!(s.delta_index(1), 2);
        assert_eq!(s.modes()[1].kind, ModeKind::Sigma);
    }

    #[test]
    fn fgf_block_diagonal() {
        let s = build_transform(&topo(&[("q1", true), ("c", false), ("q2", true)]));
        let expected = DMatrix::from_row_slice(
            5,
            5,
            &[
                0.5, 0.5, 0.0, 0.0, 0.0, //
                0.5, -0.5, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.5, 0.5, //
                0.0, 0.0, 0.0, 0.5, -0.5,
            ],
        );
        assert_eq!(s.matrix(), &expected);
        assert!(s.matrix().clone().try_inverse().is_some());
    }
}
