//! Named QCQ configurations and the closed-form A, B, E_Cq of the
//! symmetric grounded-grounded-grounded case.

use super::{extract_energies, CapacitanceNetwork, Element, ElementTopology, Role};
use crate::constants::PhysConstants;
use crate::error::{QcqError, Result};

/// Symmetric G-G-G capacitances (fF).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GggCaps {
    /// Qubit self capacitance.
    pub c0q: f64,
    /// Coupler self capacitance.
    pub c0c: f64,
    /// Qubit-coupler mutual.
    pub cqc: f64,
    /// Qubit-qubit mutual.
    pub cqq: f64,
}

/// Long-range G-F-G capacitances (fF): grounded qubits, floating coupler
/// with plates `c.1`, `c.2`; no direct qubit-qubit mutual.
///
/// `c1q` (`c2q`) couples coupler plate 1 (plate 2) to each of the qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfgCaps {
    pub c12: f64,
    pub c1q: f64,
    pub c2q: f64,
    pub c0q: f64,
    pub c01: f64,
    pub c02: f64,
}

/// F-G-F capacitances (fF) without qubit-qubit mutuals. Plates 1, 2 belong
/// to qubit 1 and plates 3, 4 to qubit 2; the coupler is grounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgfCaps {
    pub c01: f64,
    pub c02: f64,
    pub c12: f64,
    pub c1c: f64,
    pub c2c: f64,
    pub c0c: f64,
    pub c3c: f64,
    pub c4c: f64,
    pub c03: f64,
    pub c04: f64,
    pub c34: f64,
}

fn qcq_topology(qubit: fn(&str) -> Element, coupler: fn(&str) -> Element) -> ElementTopology {
    ElementTopology::new(vec![
        qubit("q1").with_role(Role::Qubit),
        coupler("c").with_role(Role::Coupler),
        qubit("q2").with_role(Role::Qubit),
    ])
    .expect("static topology")
}

pub fn ggg_symmetric(caps: GggCaps) -> Result<CapacitanceNetwork> {
    CapacitanceNetwork::new(qcq_topology(Element::grounded, Element::grounded))
        .with_self_cap("q1", caps.c0q)?
        .with_self_cap("q2", caps.c0q)?
        .with_self_cap("c", caps.c0c)?
        .with_mutual_cap("q1", "c", caps.cqc)?
        .with_mutual_cap("q2", "c", caps.cqc)?
        .with_mutual_cap("q1", "q2", caps.cqq)
}

pub fn gfg_long_range(caps: GfgCaps) -> Result<CapacitanceNetwork> {
    CapacitanceNetwork::new(qcq_topology(Element::grounded, Element::floating))
        .with_self_cap("q1", caps.c0q)?
        .with_self_cap("q2", caps.c0q)?
        .with_self_cap("c.1", caps.c01)?
        .with_self_cap("c.2", caps.c02)?
        .with_mutual_cap("c.1", "c.2", caps.c12)?
        .with_mutual_cap("q1", "c.1", caps.c1q)?
        .with_mutual_cap("q2", "c.1", caps.c1q)?
        .with_mutual_cap("q1", "c.2", caps.c2q)?
        .with_mutual_cap("q2", "c.2", caps.c2q)
}

/// F-G-F network; `qubit_mutual` adds a (normally absent) mutual between
/// the facing plates `q1.2` and `q2.1`.
pub fn fgf_long_range(caps: FgfCaps, qubit_mutual: f64) -> Result<CapacitanceNetwork> {
    CapacitanceNetwork::new(qcq_topology(Element::floating, Element::grounded))
        .with_self_cap("q1.1", caps.c01)?
        .with_self_cap("q1.2", caps.c02)?
        .with_self_cap("c", caps.c0c)?
        .with_self_cap("q2.1", caps.c03)?
        .with_self_cap("q2.2", caps.c04)?
        .with_mutual_cap("q1.1", "q1.2", caps.c12)?
        .with_mutual_cap("q1.1", "c", caps.c1c)?
        .with_mutual_cap("q1.2", "c", caps.c2c)?
        .with_mutual_cap("q2.1", "c", caps.c3c)?
        .with_mutual_cap("q2.2", "c", caps.c4c)?
        .with_mutual_cap("q2.1", "q2.2", caps.c34)?
        .with_mutual_cap("q1.2", "q2.1", qubit_mutual)
}

/// A of a long-range F-G-F network through the full matrix pipeline.
pub fn check_fgf_longrange_a(caps: FgfCaps, constants: &PhysConstants) -> Result<f64> {
    let net = fgf_long_range(caps, 0.0)?;
    Ok(extract_energies(&net, constants)?.qcq()?.a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormGgg {
    pub a: f64,
    pub b: f64,
    /// GHz.
    pub e_cq: f64,
}

/// Explicit A, B and qubit charging energy of the symmetric G-G-G network.
pub fn closed_form_ggg(caps: GggCaps, constants: &PhysConstants) -> Result<ClosedFormGgg> {
    let GggCaps { c0q, c0c, cqc, cqq } = caps;
    if !(cqc > 0.0) {
        return Err(QcqError::InvalidParameter(
            "closed form requires a positive qubit-coupler mutual".into(),
        ));
    }
    let qc = c0q + cqc;
    let sum = qc + 2.0 * cqq;
    let det_like = c0c * qc + 2.0 * c0q * cqc;
    if sum == 0.0 || det_like == 0.0 {
        return Err(QcqError::InvalidParameter(
            "closed-form denominator vanishes".into(),
        ));
    }
    let a = qc * (cqc * cqc + c0c * cqq + 2.0 * cqc * cqq) / (cqc * cqc * sum);
    let b = 4.0 * c0c * qc * (qc + cqq) / (cqc * cqc * sum)
        + 4.0 * qc * (2.0 * c0q + cqc + 2.0 * cqq) / (cqc * sum);
    let e_cq = constants.e2_over_h() * 0.25 * ((c0c + 2.0 * cqc) / det_like + 1.0 / sum);
    Ok(ClosedFormGgg { a, b, e_cq })
}
