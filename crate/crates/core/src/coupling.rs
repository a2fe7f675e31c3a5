//! Transmon frequencies, pairwise couplings and the effective qubit-qubit
//! coupling through a tunable coupler, in the regime ω_c > ω_q.
//!
//! All frequencies and energies are in GHz.

use serde::{Deserialize, Serialize};

use crate::capnet::QcqEnergies;
use crate::error::{QcqError, Result};

/// Operating points closer than this to a pole are rejected (GHz).
pub const POLE_GUARD_GHZ: f64 = 1e-3;
/// Absolute slack on the A = 1 boundary.
pub const A_BOUNDARY_SLACK: f64 = 1e-12;
/// Below this E_J/E_C the transmon approximation is flagged.
pub const TRANSMON_RATIO_WARNING: f64 = 20.0;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(QcqError::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub e_c: f64,
    pub e_j: f64,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j: f64) -> Result<Self> {
        positive("E_C", e_c)?;
        positive("E_J", e_j)?;
        Ok(Self { e_c, e_j })
    }

    /// Parameters that put the transmon at `omega` for the given E_C.
    pub fn for_frequency(omega: f64, e_c: f64) -> Result<Self> {
        Self::new(e_c, ej_for_frequency(omega, e_c)?)
    }

    /// E_J/E_C below the transmon regime.
    pub fn outside_transmon_regime(&self) -> bool {
        self.e_j / self.e_c < TRANSMON_RATIO_WARNING
    }

    /// √(8E_CE_J).
    pub fn linear_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_j).sqrt()
    }
}

/// ω = √(8E_CE_J) − E_C.
pub fn transmon_frequency(p: TransmonParams) -> Result<f64> {
    positive("E_C", p.e_c)?;
    positive("E_J", p.e_j)?;
    Ok(p.linear_frequency() - p.e_c)
}

/// E_J = (ω + E_C)²/(8E_C), the inverse of [`transmon_frequency`].
pub fn ej_for_frequency(omega: f64, e_c: f64) -> Result<f64> {
    positive("frequency", omega)?;
    positive("E_C", e_c)?;
    Ok((omega + e_c).powi(2) / (8.0 * e_c))
}

/// g_ij = (E_ij/√2)·(E_Ji/E_Ci · E_Jj/E_Cj)^(1/4).
pub fn pairwise_g(e_ij: f64, p_i: TransmonParams, p_j: TransmonParams) -> Result<f64> {
    for p in [p_i, p_j] {
        positive("E_C", p.e_c)?;
        positive("E_J", p.e_j)?;
    }
    let ratio = (p_i.e_j / p_i.e_c) * (p_j.e_j / p_j.e_c);
    Ok(e_ij / std::f64::consts::SQRT_2 * ratio.powf(0.25))
}

/// Which critical coupler frequency is the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubRegime {
    /// ω_on < ω_off: coupling is switched on at ω_s and off at ω_l.
    OnBelowOff,
    /// ω_on > ω_off: coupling is switched off at ω_s and on at ω_l.
    OnAboveOff,
}

impl SubRegime {
    pub const ALL: [SubRegime; 2] = [SubRegime::OnBelowOff, SubRegime::OnAboveOff];

    pub fn label(self) -> &'static str {
        match self {
            SubRegime::OnBelowOff => "on_below_off",
            SubRegime::OnAboveOff => "on_above_off",
        }
    }

    /// (ω_on, ω_off) given the smaller and larger critical frequencies.
    pub fn on_off(self, omega_s: f64, omega_l: f64) -> (f64, f64) {
        match self {
            SubRegime::OnBelowOff => (omega_s, omega_l),
            SubRegime::OnAboveOff => (omega_l, omega_s),
        }
    }
}

/// Critical coupler frequencies of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeTag {
    pub ordering: SubRegime,
    pub omega_on: f64,
    pub omega_off: f64,
    pub omega_s: f64,
    pub omega_l: f64,
}

impl RegimeTag {
    pub fn new(omega_on: f64, omega_off: f64) -> Result<Self> {
        positive("ω_on", omega_on)?;
        positive("ω_off", omega_off)?;
        if omega_on == omega_off {
            return Err(QcqError::Domain("ω_on and ω_off must differ".into()));
        }
        let ordering = if omega_on < omega_off {
            SubRegime::OnBelowOff
        } else {
            SubRegime::OnAboveOff
        };
        Ok(Self {
            ordering,
            omega_on,
            omega_off,
            omega_s: omega_on.min(omega_off),
            omega_l: omega_on.max(omega_off),
        })
    }
}

/// Qubit and coupler frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub omega_q1: f64,
    pub omega_q2: f64,
    pub omega_c: f64,
}

impl OperatingPoint {
    pub fn new(omega_q1: f64, omega_q2: f64, omega_c: f64) -> Result<Self> {
        positive("ω_q1", omega_q1)?;
        positive("ω_q2", omega_q2)?;
        positive("ω_c", omega_c)?;
        Ok(Self {
            omega_q1,
            omega_q2,
            omega_c,
        })
    }

    pub fn symmetric(omega_q: f64, omega_c: f64) -> Result<Self> {
        Self::new(omega_q, omega_q, omega_c)
    }

    pub fn detunings(&self) -> (f64, f64) {
        (self.omega_c - self.omega_q1, self.omega_c - self.omega_q2)
    }

    pub fn sums(&self) -> (f64, f64) {
        (self.omega_c + self.omega_q1, self.omega_c + self.omega_q2)
    }

    /// Coupler above both qubits.
    pub fn in_regime(&self) -> bool {
        self.omega_c > self.omega_q1.max(self.omega_q2)
    }
}

/// g = g12 − (g1c·g2c/2)(1/Δ₁ + 1/Δ₂ + 1/Σ₁ + 1/Σ₂).
pub fn general_g(g12: f64, g1c: f64, g2c: f64, pt: OperatingPoint) -> Result<f64> {
    let (d1, d2) = pt.detunings();
    if d1.abs() < POLE_GUARD_GHZ || d2.abs() < POLE_GUARD_GHZ {
        return Err(QcqError::Degenerate(format!(
            "coupler at {} GHz is resonant with a qubit",
            pt.omega_c
        )));
    }
    let (s1, s2) = pt.sums();
    Ok(g12 - 0.5 * g1c * g2c * (1.0 / d1 + 1.0 / d2 + 1.0 / s1 + 1.0 / s2))
}

fn check_pole(omega_q: f64, omega_c: f64) -> Result<()> {
    positive("ω_q", omega_q)?;
    positive("ω_c", omega_c)?;
    if (omega_c - omega_q).abs() < POLE_GUARD_GHZ {
        return Err(QcqError::Degenerate(format!(
            "ω_c = {omega_c} GHz within {} MHz of ω_q = {omega_q} GHz",
            POLE_GUARD_GHZ * 1e3
        )));
    }
    Ok(())
}

/// g = (2ω_q/B)(A − ω_c²/(ω_c² − ω_q²)).
pub fn simplified_g(a: f64, b: f64, omega_q: f64, omega_c: f64) -> Result<f64> {
    check_pole(omega_q, omega_c)?;
    if b == 0.0 || !b.is_finite() {
        return Err(QcqError::InvalidParameter(format!(
            "B must be non-zero, got {b}"
        )));
    }
    let wc2 = omega_c * omega_c;
    Ok(2.0 * omega_q / b * (a - wc2 / (wc2 - omega_q * omega_q)))
}

/// Coupling before the ω ≈ ω^lin approximation, with ω^lin = ω + E_C for
/// qubit and coupler and symmetric qubits.
pub fn linear_frequency_g(e: &QcqEnergies, omega_q: f64, omega_c: f64) -> Result<f64> {
    check_pole(omega_q, omega_c)?;
    let e_cq = e.e_cq();
    let wq_lin = omega_q + e_cq;
    let wc_lin = omega_c + e.e_cc;
    let mediated = e.e_1c * e.e_2c / (2.0 * e_cq * e.e_cc) * wc_lin * omega_c
        / (omega_c * omega_c - omega_q * omega_q);
    Ok(wq_lin / 4.0 * (e.e_12 / e_cq - mediated))
}

/// β = √|B|·(ω_c − ω_q)/√(ω_qω_c).
pub fn dispersive_beta(b: f64, omega_q: f64, omega_c: f64) -> Result<f64> {
    positive("ω_q", omega_q)?;
    positive("ω_c", omega_c)?;
    if b == 0.0 || !b.is_finite() {
        return Err(QcqError::InvalidParameter(format!(
            "B must be non-zero, got {b}"
        )));
    }
    if omega_c <= omega_q {
        return Err(QcqError::Domain(format!(
            "dispersive rate needs ω_c > ω_q (ω_c = {omega_c}, ω_q = {omega_q})"
        )));
    }
    Ok(b.abs().sqrt() * (omega_c - omega_q) / (omega_q * omega_c).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub a: f64,
    pub b_abs: f64,
    pub beta_s: f64,
    /// ½(1 + √(1 + 4|B|/β_s²)).
    pub upper_limit: f64,
}

impl Feasibility {
    pub fn reason(&self) -> String {
        if self.feasible {
            format!("1 < A = {:.6} <= {:.6}", self.a, self.upper_limit)
        } else if self.a <= 1.0 + A_BOUNDARY_SLACK {
            format!("A = {:.6} <= 1: the coupling never crosses zero", self.a)
        } else {
            format!(
                "A = {:.6} exceeds the dispersive limit {:.6}",
                self.a, self.upper_limit
            )
        }
    }
}

/// Whether g = 0 is reachable with β ≥ β_s: 1 < A ≤ ½(1 + √(1 + 4|B|/β_s²)).
pub fn zero_coupling_feasible(a: f64, b: f64, beta_s: f64) -> Result<Feasibility> {
    positive("β_s", beta_s)?;
    let b_abs = b.abs();
    let upper_limit = 0.5 * (1.0 + (1.0 + 4.0 * b_abs / (beta_s * beta_s)).sqrt());
    let feasible = a > 1.0 + A_BOUNDARY_SLACK && a <= upper_limit;
    Ok(Feasibility {
        feasible,
        a,
        b_abs,
        beta_s,
        upper_limit,
    })
}

/// Coupler frequency of the zero crossing: ω_q·√(A/(A − 1)).
pub fn omega_off(a: f64, omega_q: f64) -> Result<f64> {
    positive("ω_q", omega_q)?;
    if !(a > 1.0 + A_BOUNDARY_SLACK) {
        return Err(QcqError::NoZeroCrossing(format!(
            "A = {a} must exceed 1 for a zero crossing"
        )));
    }
    Ok(omega_q * (a / (a - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn frequency_of_reference_qubit() {
        let w = transmon_frequency(TransmonParams::new(0.230, 25.43).unwrap()).unwrap();
        assert!((w - 6.610).abs() < 1e-3);
    }

    #[test]
    fn frequency_round_trip() {
        for (w, ec) in [(6.61, 0.23), (15.0, 0.088), (4.2, 0.31)] {
            let p = TransmonParams::for_frequency(w, ec).unwrap();
            assert!((transmon_frequency(p).unwrap() - w).abs() < 1e-12);
        }
    }

    #[test]
    fn coupler_josephson_energy() {
        let ej = ej_for_frequency(15.0, 0.088).unwrap();
        assert!((ej - 323.36).abs() < 0.01);
    }

    #[test]
    fn invalid_transmon_inputs() {
        assert!(TransmonParams::new(0.0, 10.0).is_err());
        assert!(TransmonParams::new(0.2, -1.0).is_err());
        assert!(ej_for_frequency(-1.0, 0.2).is_err());
        assert!(TransmonParams::new(1.0, 10.0)
            .unwrap()
            .outside_transmon_regime());
    }

    #[test]
    fn pairwise_g_cases() {
        let p = TransmonParams::new(0.25, 16.0).unwrap(); // E_J/E_C = 64
        assert_eq!(pairwise_g(0.0, p, p).unwrap(), 0.0);
        let g = pairwise_g(0.01, p, p).unwrap();
        // (64·64)^(1/4) = 8, 8/√2 = 4√2.
        assert!(rel(g, 0.01 * 8.0 / std::f64::consts::SQRT_2) < 1e-14);
        assert_eq!(pairwise_g(-0.01, p, p).unwrap(), -g);
    }

    #[test]
    fn general_g_limits() {
        let pt = OperatingPoint::symmetric(6.0, 8.0).unwrap();
        assert_eq!(general_g(0.003, 0.0, 0.1, pt).unwrap(), 0.003);
        let far = OperatingPoint::symmetric(6.0, 1e9).unwrap();
        assert!((general_g(0.003, 0.1, 0.1, far).unwrap() - 0.003).abs() < 1e-9);
        let pole = OperatingPoint::symmetric(6.0, 6.0005).unwrap();
        assert!(matches!(
            general_g(0.003, 0.1, 0.1, pole),
            Err(QcqError::Degenerate(_))
        ));
    }

    #[test]
    fn simplified_g_reference_rows() {
        let g1 = simplified_g(1.24022, 640.0, 6.6015, 9.78).unwrap();
        assert!((g1 * 1e3 + 12.3).abs() < 0.05, "{g1}");
        let g2 = simplified_g(1.83697, 640.0, 6.6015, 15.0).unwrap();
        assert!((g2 * 1e3 - 12.3).abs() < 0.05, "{g2}");
    }

    #[test]
    fn simplified_g_zero_and_pole() {
        let (a, wq) = (1.5, 6.0);
        let wc = wq * (a / (a - 1.0f64)).sqrt();
        assert!(simplified_g(a, 500.0, wq, wc).unwrap().abs() < 1e-15);
        assert!(simplified_g(a, 500.0, wq, wq + 5e-4).is_err());
        assert!(simplified_g(a, 0.0, wq, 8.0).is_err());
    }

    #[test]
    fn beta_values() {
        let b1 = dispersive_beta(640.0, 6.6015, 9.78).unwrap();
        assert!((b1 - 10.0).abs() < 0.02, "{b1}");
        let b2 = dispersive_beta(1280.0, 6.5, 8.2).unwrap();
        assert!((b2 - 8.3).abs() < 0.05, "{b2}");
        let b3 = dispersive_beta(640.0, 6.0, 6.0 + 1e-9).unwrap();
        assert!(b3 < 1e-7);
        assert!(dispersive_beta(640.0, 6.0, 5.0).is_err());
    }

    #[test]
    fn feasibility_verdicts() {
        assert!(!zero_coupling_feasible(1.0, 640.0, 10.0).unwrap().feasible);
        let ok = zero_coupling_feasible(1.24, 640.0, 10.0).unwrap();
        assert!(ok.feasible);
        assert!((ok.upper_limit - 0.5 * (1.0 + 26.6f64.sqrt())).abs() < 1e-12);
        assert!((ok.upper_limit - 3.079).abs() < 1e-3);
        let bad = zero_coupling_feasible(5.0, 640.0, 10.0).unwrap();
        assert!(!bad.feasible);
        assert!(bad.reason().contains("dispersive"));
    }

    #[test]
    fn omega_off_values() {
        assert!((omega_off(1.84, 6.61).unwrap() - 9.78).abs() < 0.02);
        assert!((omega_off(2.0, 6.0).unwrap() - 6.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            omega_off(1.0, 6.0),
            Err(QcqError::NoZeroCrossing(_))
        ));
        assert!(omega_off(1.0 + 1e-13, 6.0).is_err());
        assert!(omega_off(1.0 + 1e-9, 6.0).unwrap() > 1e4);
    }

    #[test]
    fn regime_tag_orders_frequencies() {
        let t = RegimeTag::new(9.78, 15.0).unwrap();
        assert_eq!(t.ordering, SubRegime::OnBelowOff);
        assert_eq!((t.omega_s, t.omega_l), (9.78, 15.0));
        let t = RegimeTag::new(15.0, 9.78).unwrap();
        assert_eq!(t.ordering, SubRegime::OnAboveOff);
        assert_eq!(t.ordering.on_off(t.omega_s, t.omega_l), (15.0, 9.78));
        assert!(RegimeTag::new(9.0, 9.0).is_err());
    }

    #[test]
    fn linear_frequency_path_exceeds_simplified() {
        // ω^lin > ω, so the unapproximated form is slightly larger in magnitude.
        let e = QcqEnergies::new(0.23, 0.23, 0.286, 0.0406, 0.0406, 0.00357).unwrap();
        let g_lin = linear_frequency_g(&e, 6.6, 9.78).unwrap();
        let g = simplified_g(e.a, e.b, 6.6, 9.78).unwrap();
        assert!(g_lin.abs() > g.abs());
        assert!((g_lin - -0.013_930_348).abs() < 1e-8);
        assert!((g - -0.012_351_109).abs() < 1e-8);
    }
}
