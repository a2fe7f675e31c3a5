//! Coupler-frequency sweeps of g and β, and their CSV form.

use serde::{Deserialize, Serialize};

use crate::coupling::{dispersive_beta, simplified_g};
use crate::error::{QcqError, Result};

pub const CSV_HEADER: &str = "omega_c_GHz,g_MHz,beta";

/// Gap kept above ω_q at the low end of design sweeps.
pub const POLE_MARGIN_GHZ: f64 = 0.05;

pub const DEFAULT_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega_c: f64,
    /// GHz; `None` where the formula is undefined at this ω_c.
    pub g: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
}

/// n uniform points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
        return Err(QcqError::InvalidParameter(format!(
            "sweep needs lo < hi and at least two points (got {lo}:{hi}:{n})"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// g(ω_c) and β(ω_c) for fixed A, B, ω_q. Points where either quantity is
/// undefined are kept with `None` rather than aborting the sweep.
pub fn sweep_coupling(a: f64, b: f64, omega_q: f64, omega_c: &[f64]) -> Sweep {
    Sweep {
        rows: omega_c
            .iter()
            .map(|&w| SweepRow {
                omega_c: w,
                g: simplified_g(a, b, omega_q, w).ok(),
                beta: dispersive_beta(b, omega_q, w).ok(),
            })
            .collect(),
    }
}

impl Sweep {
    /// Rows where g or β could not be evaluated.
    pub fn flagged(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.g.is_none() || r.beta.is_none())
            .count()
    }

    /// Header plus one line per row, LF-terminated; undefined values as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let cell = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), sig6);
        for r in &self.rows {
            out.push_str(&sig6(r.omega_c));
            out.push(',');
            out.push_str(&cell(r.g.map(|g| g * 1e3)));
            out.push(',');
            out.push_str(&cell(r.beta));
            out.push('\n');
        }
        out
    }

    /// Linearly interpolated ω_c values where g changes sign.
    pub fn zero_crossings(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter_map(|w| match (w[0].g, w[1].g) {
                (Some(g0), Some(g1)) if g0 == 0.0 => Some(w[0].omega_c).filter(|_| g1 != 0.0),
                (Some(g0), Some(g1)) if g0 * g1 < 0.0 => {
                    Some(w[0].omega_c + (w[1].omega_c - w[0].omega_c) * g0 / (g0 - g1))
                }
                _ => None,
            })
            .collect()
    }
}

/// Six significant digits, '.' separator, plain notation for moderate
/// magnitudes and exponent notation otherwise.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0.00000".into();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-4..=5).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, v)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(9.78), "9.78000");
        assert_eq!(sig6(-12.3301234), "-12.3301");
        assert_eq!(sig6(9.999996), "10.0000");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(0.0), "0.00000");
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(7.0, 15.0, 201).unwrap();
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], 7.0);
        assert_eq!(v[200], 15.0);
        assert!((v[100] - 11.0).abs() < 1e-12);
        assert!(linspace(3.0, 3.0, 5).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = sweep_coupling(1.84, 640.0, 6.61, &[6.61, 9.78, 15.0]);
        let csv = s.to_csv();
        let lines: Vec<_> = csv.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("6.61000,nan,"));
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "");
        assert!(!csv.contains('\r'));
        assert_eq!(s.flagged(), 1);
    }

    #[test]
    fn crossing_matches_zero_law() {
        let grid = linspace(6.7, 15.0, 801).unwrap();
        let s = sweep_coupling(1.84, 640.0, 6.61, &grid);
        let z = s.zero_crossings();
        assert_eq!(z.len(), 1);
        let exact = 6.61 * (1.84f64 / 0.84).sqrt();
        assert!((z[0] - exact).abs() < 1e-3);
    }
}
