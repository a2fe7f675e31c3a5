//! Physical constants in the internal unit system.
//!
//! Capacitances are in fF, inductances in nH, and energies are quoted as
//! frequencies in GHz (E/h).

use std::f64::consts::PI;

/// Elementary charge, C (exact SI value).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    e2_over_h: f64,
}

impl PhysConstants {
    /// CODATA values: e²/h ≈ 38.7405 GHz·fF.
    pub fn codata() -> Self {
        // e²/h in siemens; 1 GHz·fF = 1e-6 S.
        let siemens = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK;
        Self {
            e2_over_h: siemens * 1e6,
        }
    }

    /// Custom conversion constant. Must be strictly positive and finite.
    pub fn with_e2_over_h(e2_over_h: f64) -> Option<Self> {
        (e2_over_h.is_finite() && e2_over_h > 0.0).then_some(Self { e2_over_h })
    }

    /// e²/h in GHz·fF.
    pub fn e2_over_h(&self) -> f64 {
        self.e2_over_h
    }

    /// Charging energy e²/(2hC) in GHz for a capacitance in fF.
    pub fn charging_energy(&self, capacitance_ff: f64) -> f64 {
        self.e2_over_h / (2.0 * capacitance_ff)
    }

    /// (Φ₀/2π)²/h in GHz·nH: E_J·L_J for a junction.
    pub fn ej_times_lj(&self) -> f64 {
        // Φ₀ = h/2e, so (Φ₀/2π)²/h = 1/(16π² e²/h).
        1e6 / (16.0 * PI * PI * self.e2_over_h)
    }

    /// Josephson inductance in nH for E_J in GHz.
    pub fn inductance_from_ej(&self, ej_ghz: f64) -> f64 {
        self.ej_times_lj() / ej_ghz
    }

    /// Josephson energy in GHz for an inductance in nH.
    pub fn ej_from_inductance(&self, l_nh: f64) -> f64 {
        self.ej_times_lj() / l_nh
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::codata()
    }
}
