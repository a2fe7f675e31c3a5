//! Linear normal modes of the capacitance-inductance network.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Mode, SpectrumResult};
use crate::capnet::{invert_checked, EnergySet, ModeKind};
use crate::constants::PhysConstants;
use crate::error::{QcqError, Result};

/// Mode-space capacitance matrix (fF) with junction inductances (nH) on the
/// Δ modes. Modes without inductance are free and carry no oscillation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCircuit {
    pub capacitance: DMatrix<f64>,
    pub inductance: Vec<Option<f64>>,
    /// Element owning each mode.
    pub mode_element: Vec<usize>,
    pub element_count: usize,
}

impl LinearCircuit {
    /// Circuit with one junction per element on its Δ mode, with E_J (GHz)
    /// given per element.
    pub fn from_energies(
        energies: &EnergySet,
        e_j: &[f64],
        constants: &PhysConstants,
    ) -> Result<Self> {
        let labels = energies.transform().modes();
        if e_j.len() != energies.element_ids().len() {
            return Err(QcqError::InvalidParameter(format!(
                "{} Josephson energies for {} elements",
                e_j.len(),
                energies.element_ids().len()
            )));
        }
        let mut inductance = Vec::with_capacity(labels.len());
        for l in labels {
            inductance.push(match l.kind {
                ModeKind::Delta => {
                    let ej = e_j[l.element];
                    if !(ej.is_finite() && ej > 0.0) {
                        return Err(QcqError::InvalidParameter(format!(
                            "E_J must be positive, got {ej}"
                        )));
                    }
                    Some(constants.inductance_from_ej(ej))
                }
                ModeKind::Sigma => None,
            });
        }
        Ok(Self {
            capacitance: energies.mode_capacitance().clone(),
            inductance,
            mode_element: labels.iter().map(|l| l.element).collect(),
            element_count: energies.element_ids().len(),
        })
    }
}

/// E_J placing a linear oscillator of charging energy E_C at ω: ω²/(8E_C).
pub fn linear_ej(omega: f64, e_c: f64) -> Result<f64> {
    if !(omega > 0.0 && e_c > 0.0) {
        return Err(QcqError::InvalidParameter(format!(
            "ω and E_C must be positive (got {omega}, {e_c})"
        )));
    }
    Ok(omega * omega / (8.0 * e_c))
}

/// Mode frequencies (GHz) from eig(L^-½ (C⁻¹)_LL L^-½) after eliminating
/// the free modes, whose conjugate charges vanish.
pub fn normal_modes(circuit: &LinearCircuit) -> Result<SpectrumResult> {
    let n = circuit.capacitance.nrows();
    if circuit.capacitance.ncols() != n
        || circuit.inductance.len() != n
        || circuit.mode_element.len() != n
    {
        return Err(QcqError::InvalidParameter(
            "circuit dimensions disagree".into(),
        ));
    }
    let inv = invert_checked(&circuit.capacitance).map_err(|e| match e {
        QcqError::InvalidNetwork(m) => QcqError::InvalidNetwork(format!("invalid circuit: {m}")),
        other => other,
    })?;
    let inductive: Vec<usize> = (0..n)
        .filter(|&i| circuit.inductance[i].is_some())
        .collect();
    if inductive.is_empty() {
        return Err(QcqError::InvalidNetwork(
            "circuit has no inductive mode".into(),
        ));
    }
    let m = inductive.len();
    let scale: Vec<f64> = inductive
        .iter()
        .map(|&i| 1.0 / circuit.inductance[i].expect("inductive").sqrt())
        .collect();
    let mut op = DMatrix::zeros(m, m);
    for (a, &i) in inductive.iter().enumerate() {
        for (b, &j) in inductive.iter().enumerate() {
            op[(a, b)] = scale[a] * inv[(i, j)] * scale[b];
        }
    }
    let op = (&op + op.transpose()) * 0.5;
    let eig = SymmetricEigen::new(op);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut modes = Vec::with_capacity(m);
    for k in order {
        let lambda = eig.eigenvalues[k];
        if lambda <= 0.0 {
            return Err(QcqError::InvalidNetwork(format!(
                "non-positive mode stiffness {lambda:e}"
            )));
        }
        let v = eig.eigenvectors.column(k);
        let mut weights = vec![0.0; circuit.element_count];
        let mut amplitude = vec![0.0; circuit.element_count];
        for (a, &i) in inductive.iter().enumerate() {
            weights[circuit.mode_element[i]] += v[a] * v[a];
            amplitude[circuit.mode_element[i]] += v[a];
        }
        modes.push(Mode {
            // 1/√(nH·fF) = 1e12 rad/s.
            frequency: 1e3 * lambda.sqrt() / (2.0 * std::f64::consts::PI),
            weights,
            amplitude,
        });
    }
    Ok(SpectrumResult {
        modes,
        warnings: Vec::new(),
    })
}
