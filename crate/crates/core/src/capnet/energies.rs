use nalgebra::{DMatrix, SymmetricEigen};

use super::{build_maxwell, build_transform, CapacitanceNetwork, QcqRoles, TransformMatrix};
use crate::constants::PhysConstants;
use crate::error::{QcqError, Result};

/// Largest accepted condition number for a capacitance matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Invert a symmetric positive-definite matrix, rejecting indefinite or
/// badly conditioned input.
pub fn invert_checked(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(QcqError::NumericalFailure("non-finite matrix entry".into()));
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v.abs()))
        });
    if lo <= 0.0 {
        return Err(QcqError::InvalidNetwork(format!(
            "capacitance matrix is not positive definite (smallest eigenvalue {lo:.3e})"
        )));
    }
    let cond = hi / lo;
    if cond > CONDITION_LIMIT {
        return Err(QcqError::NumericalFailure(format!(
            "condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )));
    }
    let inv = matrix
        .clone()
        .cholesky()
        .ok_or_else(|| QcqError::InvalidNetwork("Cholesky factorization failed".into()))?
        .inverse();
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(QcqError::NumericalFailure(
            "non-finite inverse entry".into(),
        ));
    }
    Ok(inv)
}

/// Charging energies and pairwise coupling energies (GHz) per element.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySet {
    element_ids: Vec<String>,
    charging: Vec<f64>,
    coupling: DMatrix<f64>,
    mode_capacitance: DMatrix<f64>,
    transform: TransformMatrix,
    roles: Option<QcqRoles>,
}

impl EnergySet {
    pub fn element_ids(&self) -> &[String] {
        &self.element_ids
    }

    /// E_C per element, in element order.
    pub fn charging(&self) -> &[f64] {
        &self.charging
    }

    /// Signed E_ij between elements (zero diagonal).
    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    /// C = SᵀMS over all Δ and Σ modes, fF.
    pub fn mode_capacitance(&self) -> &DMatrix<f64> {
        &self.mode_capacitance
    }

    pub fn transform(&self) -> &TransformMatrix {
        &self.transform
    }

    pub fn charging_of(&self, id: &str) -> Option<f64> {
        let i = self.element_ids.iter().position(|e| e == id)?;
        Some(self.charging[i])
    }

    pub fn coupling_between(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.element_ids.iter().position(|e| e == a)?;
        let j = self.element_ids.iter().position(|e| e == b)?;
        Some(self.coupling[(i, j)])
    }

    pub fn roles(&self) -> Result<QcqRoles> {
        self.roles.ok_or_else(|| {
            QcqError::InvalidTopology("QCQ analysis needs two qubits and one coupler".into())
        })
    }

    /// The six QCQ energies and the derived A, B.
    pub fn qcq(&self) -> Result<QcqEnergies> {
        let r = self.roles()?;
        QcqEnergies::new(
            self.charging[r.qubit1],
            self.charging[r.qubit2],
            self.charging[r.coupler],
            self.coupling[(r.qubit1, r.coupler)],
            self.coupling[(r.qubit2, r.coupler)],
            self.coupling[(r.qubit1, r.qubit2)],
        )
    }
}

/// QCQ charging/coupling energies (GHz) with A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcqEnergies {
    pub e_c1: f64,
    pub e_c2: f64,
    pub e_cc: f64,
    pub e_1c: f64,
    pub e_2c: f64,
    pub e_12: f64,
    pub a: f64,
    pub b: f64,
}

impl QcqEnergies {
    pub fn new(e_c1: f64, e_c2: f64, e_cc: f64, e_1c: f64, e_2c: f64, e_12: f64) -> Result<Self> {
        if [e_c1, e_c2, e_cc].iter().any(|&e| !(e > 0.0)) {
            return Err(QcqError::InvalidNetwork(
                "charging energies must be positive".into(),
            ));
        }
        let denom = e_1c * e_2c;
        if denom == 0.0 || !denom.is_finite() {
            return Err(QcqError::Degenerate(
                "A and B undefined: qubit-coupler coupling energy E_1c·E_2c is zero".into(),
            ));
        }
        Ok(Self {
            e_c1,
            e_c2,
            e_cc,
            e_1c,
            e_2c,
            e_12,
            a: 2.0 * e_12 * e_cc / denom,
            b: 16.0 * (e_c1 * e_c2).sqrt() * e_cc / denom,
        })
    }

    /// Qubit charging energy; geometric mean for non-identical qubits.
    pub fn e_cq(&self) -> f64 {
        (self.e_c1 * self.e_c2).sqrt()
    }

    /// Identical, symmetric qubits within relative `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let rel = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(y.abs());
        rel(self.e_c1, self.e_c2) && rel(self.e_1c.abs(), self.e_2c.abs())
    }
}

/// E_Ck = (e²/h)(C⁻¹)_{Δk,Δk}/2 and E_ij = (e²/h)(C⁻¹)_{Δi,Δj} with
/// C = SᵀMS inverted over all modes before Δ entries are selected.
pub fn extract_energies(
    network: &CapacitanceNetwork,
    constants: &PhysConstants,
) -> Result<EnergySet> {
    let topology = network.topology();
    let maxwell = build_maxwell(network)?;
    let transform = build_transform(topology);
    let s = transform.matrix();
    let c = s.transpose() * maxwell.matrix() * s;
    let c = (&c + c.transpose()) * 0.5;
    let inv = invert_checked(&c)?;

    let k = topology.elements().len();
    let delta: Vec<usize> = (0..k).map(|e| transform.delta_index(e)).collect();
    let e2h = constants.e2_over_h();
    let charging: Vec<f64> = delta.iter().map(|&d| e2h * inv[(d, d)] / 2.0).collect();
    let mut coupling = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                coupling[(i, j)] = e2h * inv[(delta[i], delta[j])];
            }
        }
    }
    if charging.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(QcqError::NumericalFailure(
            "non-positive charging energy".into(),
        ));
    }
    Ok(EnergySet {
        element_ids: topology.elements().iter().map(|e| e.id.clone()).collect(),
        charging,
        coupling,
        mode_capacitance: c,
        transform,
        roles: topology.qcq_roles().ok(),
    })
}
