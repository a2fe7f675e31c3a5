//! Upper bound of the turned-on coupling.
//!
//! With x = ω_q/ω_s and y = ω_s/ω_l the turned-on coupling factorises as
//! |g_on| = (2ω_l/β_s²)·f(x, y). The maximum of f over the unit square gives
//! a layout-independent ceiling on |g_on|.

mod maximizer;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use maximizer::{
    grid_scan, GridScan, Maximizer, MaximizerRegistry, NelderMead, NewtonAscent, Objective2d,
};

use crate::coupling::SubRegime;
use crate::error::{QcqError, Result};

/// Required gradient norm at the reported maximizer.
pub const GRADIENT_TOLERANCE: f64 = 1e-10;

/// The rounded ω_q-form coefficient quoted with the processor estimates
/// (|g_on|max ≈ 0.187·ω_q/β_s²).
pub const ROUNDED_QUBIT_COEFFICIENT: f64 = 0.187;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYPoint {
    x: f64,
    y: f64,
}

impl XYPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let inside = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if !inside(x) || !inside(y) {
            return Err(QcqError::Domain(format!(
                "(x, y) = ({x}, {y}) must lie in the open unit square"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// f(x, y) = (1−x)(1−y²)x²y / ((1+x)(1−x²y²)).
pub fn f(p: XYPoint) -> f64 {
    f_unchecked(p.x, p.y)
}

pub(crate) fn f_unchecked(x: f64, y: f64) -> f64 {
    (1.0 - x) * (1.0 - y * y) * x * x * y / ((1.0 + x) * (1.0 - x * x * y * y))
}

/// Gradient and Hessian of ln f.
fn log_derivatives(x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let q = 1.0 - x * x * y * y;
    let lx = -1.0 / (1.0 - x) + 2.0 / x - 1.0 / (1.0 + x) + 2.0 * x * y * y / q;
    let ly = -2.0 * y / (1.0 - y * y) + 1.0 / y + 2.0 * x * x * y / q;
    let lxx = -1.0 / (1.0 - x).powi(2) - 2.0 / (x * x)
        + 1.0 / (1.0 + x).powi(2)
        + 2.0 * y * y * (1.0 + x * x * y * y) / (q * q);
    let lyy = -2.0 * (1.0 + y * y) / (1.0 - y * y).powi(2) - 1.0 / (y * y)
        + 2.0 * x * x * (1.0 + x * x * y * y) / (q * q);
    let lxy = 4.0 * x * y / (q * q);
    ([lx, ly], [[lxx, lxy], [lxy, lyy]])
}

/// ∇f.
pub fn gradient(p: XYPoint) -> [f64; 2] {
    let v = f(p);
    let (g, _) = log_derivatives(p.x, p.y);
    [v * g[0], v * g[1]]
}

/// Hessian of f.
pub fn hessian(p: XYPoint) -> [[f64; 2]; 2] {
    let v = f(p);
    let (g, h) = log_derivatives(p.x, p.y);
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = v * (h[i][j] + g[i] * g[j]);
        }
    }
    out
}

/// f on the open unit square, as an objective for the maximizers.
#[derive(Debug, Clone, Copy, Default)]
pub struct CouplingSurface;

impl Objective2d for CouplingSurface {
    fn value(&self, p: [f64; 2]) -> Option<f64> {
        XYPoint::new(p[0], p[1]).ok().map(f)
    }

    fn gradient(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        XYPoint::new(p[0], p[1]).ok().map(gradient)
    }

    fn hessian(&self, p: [f64; 2]) -> Option<[[f64; 2]; 2]> {
        XYPoint::new(p[0], p[1]).ok().map(hessian)
    }

    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        ([0.0, 0.0], [1.0, 1.0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub x_star: f64,
    pub y_star: f64,
    pub f_star: f64,
    pub gradient_norm: f64,
    pub method: String,
}

impl BoundResult {
    pub fn xy(&self) -> XYPoint {
        XYPoint {
            x: self.x_star,
            y: self.y_star,
        }
    }

    /// Maximum |g_on| (GHz) for the given ceiling and dispersive floor.
    pub fn g_on_max(&self, omega_l: f64, beta_s: f64) -> Result<f64> {
        check_prefactor(omega_l, beta_s)?;
        Ok(2.0 * omega_l * self.f_star / (beta_s * beta_s))
    }

    /// 2f*/(x*y*): the bound rewritten in terms of the optimal qubit frequency.
    pub fn qubit_coefficient(&self) -> f64 {
        2.0 * self.f_star / (self.x_star * self.y_star)
    }
}

/// Run a named maximizer from the best cell of a 100×100 grid scan.
pub fn maximize_with(registry: &MaximizerRegistry, method: &str) -> Result<BoundResult> {
    let maximizer = registry.get(method)?;
    let start = grid_scan(&CouplingSurface, 100);
    let p = maximizer.maximize(&CouplingSurface, start.point)?;
    let xy = XYPoint::new(p[0], p[1])?;
    let g = gradient(xy);
    Ok(BoundResult {
        x_star: xy.x,
        y_star: xy.y,
        f_star: f(xy),
        gradient_norm: g[0].hypot(g[1]),
        method: maximizer.name().to_string(),
    })
}

/// Interior maximum of f: damped Newton, falling back to Nelder–Mead
/// followed by a Newton polish when Newton alone does not converge.
pub fn maximize_f() -> Result<BoundResult> {
    static OPTIMUM: OnceLock<std::result::Result<BoundResult, QcqError>> = OnceLock::new();
    OPTIMUM.get_or_init(solve_optimum).clone()
}

fn solve_optimum() -> Result<BoundResult> {
    let registry = MaximizerRegistry::with_defaults();
    if let Ok(r) = maximize_with(&registry, "newton") {
        if r.gradient_norm < GRADIENT_TOLERANCE {
            return Ok(r);
        }
    }
    let rough = maximize_with(&registry, "nelder-mead")?;
    if rough.gradient_norm < GRADIENT_TOLERANCE {
        return Ok(rough);
    }
    let polished = registry
        .get("newton")?
        .maximize(&CouplingSurface, [rough.x_star, rough.y_star])?;
    let xy = XYPoint::new(polished[0], polished[1])?;
    let g = gradient(xy);
    let norm = g[0].hypot(g[1]);
    if norm >= GRADIENT_TOLERANCE {
        return Err(QcqError::NumericalFailure(format!(
            "maximizer stalled with |grad f| = {norm:.3e}"
        )));
    }
    Ok(BoundResult {
        x_star: xy.x,
        y_star: xy.y,
        f_star: f(xy),
        gradient_norm: norm,
        method: "nelder-mead+newton".into(),
    })
}

fn check_prefactor(omega_l: f64, beta_s: f64) -> Result<()> {
    if !(omega_l.is_finite() && omega_l > 0.0 && beta_s.is_finite() && beta_s > 0.0) {
        return Err(QcqError::InvalidParameter(format!(
            "ω_l and β_s must be positive (got {omega_l}, {beta_s})"
        )));
    }
    Ok(())
}

/// |g_on| = (2ω_l/β_s²)·f(x, y), GHz.
pub fn g_on(p: XYPoint, omega_l: f64, beta_s: f64) -> Result<f64> {
    check_prefactor(omega_l, beta_s)?;
    Ok(2.0 * omega_l / (beta_s * beta_s) * f(p))
}

/// Upper bound of |g_on| in GHz.
pub fn g_on_max(omega_l: f64, beta_s: f64) -> Result<f64> {
    maximize_f()?.g_on_max(omega_l, beta_s)
}

/// Bound expressed through the qubit frequency, `coefficient`·ω_q/β_s².
pub fn g_on_max_from_qubit(omega_q: f64, beta_s: f64, coefficient: f64) -> Result<f64> {
    check_prefactor(omega_q, beta_s)?;
    Ok(coefficient * omega_q / (beta_s * beta_s))
}

/// Design quantities implied by (x, y, ω_l, β_s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XyParams {
    pub a: f64,
    pub b_abs: f64,
    pub omega_q: f64,
    pub omega_s: f64,
}

pub fn params_from_xy(
    p: XYPoint,
    omega_l: f64,
    beta_s: f64,
    regime: SubRegime,
) -> Result<XyParams> {
    check_prefactor(omega_l, beta_s)?;
    let (x, y) = (p.x, p.y);
    let a = match regime {
        SubRegime::OnAboveOff => 1.0 / (1.0 - x * x),
        SubRegime::OnBelowOff => 1.0 / (1.0 - x * x * y * y),
    };
    Ok(XyParams {
        a,
        b_abs: x * beta_s * beta_s / (1.0 - x).powi(2),
        omega_q: x * y * omega_l,
        omega_s: y * omega_l,
    })
}

/// (x, y) = (ω_q/ω_s, ω_s/ω_l).
pub fn xy_from_design(omega_q: f64, omega_s: f64, omega_l: f64) -> Result<XYPoint> {
    if !(omega_q > 0.0 && omega_q < omega_s && omega_s < omega_l) {
        return Err(QcqError::Domain(format!(
            "need 0 < ω_q < ω_s < ω_l (got {omega_q}, {omega_s}, {omega_l})"
        )));
    }
    XYPoint::new(omega_q / omega_s, omega_s / omega_l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(x: f64, y: f64) -> XYPoint {
        XYPoint::new(x, y).unwrap()
    }

    #[test]
    fn f_reference_values() {
        assert!((f(xy(0.675, 0.652)) - 0.0411).abs() < 5e-5);
        assert!((f(xy(0.8, 0.652)) - 0.03662).abs() < 1e-5);
    }

    #[test]
    fn f_vanishes_at_edges() {
        for t in [0.1, 0.5, 0.9] {
            assert_eq!(f_unchecked(t, 1.0), 0.0);
            assert!(f_unchecked(1.0 - 1e-12, t) < 1e-11);
            assert!(f_unchecked(1e-9, t) < 1e-17);
            assert!(f_unchecked(t, 1e-12) < 1e-12);
        }
    }

    #[test]
    fn domain_is_open() {
        assert!(XYPoint::new(0.0, 0.5).is_err());
        assert!(XYPoint::new(0.5, 1.0).is_err());
        assert!(XYPoint::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for &(x, y) in &[(0.3, 0.4), (0.675, 0.652), (0.9, 0.2)] {
            let g = gradient(xy(x, y));
            let fx = (f(xy(x + h, y)) - f(xy(x - h, y))) / (2.0 * h);
            let fy = (f(xy(x, y + h)) - f(xy(x, y - h))) / (2.0 * h);
            assert!((g[0] - fx).abs() < 1e-8);
            assert!((g[1] - fy).abs() < 1e-8);
            let hs = hessian(xy(x, y));
            let gxp = gradient(xy(x + h, y));
            let gxm = gradient(xy(x - h, y));
            let gyp = gradient(xy(x, y + h));
            let gym = gradient(xy(x, y - h));
            assert!((hs[0][0] - (gxp[0] - gxm[0]) / (2.0 * h)).abs() < 1e-6);
            assert!((hs[0][1] - (gyp[0] - gym[0]) / (2.0 * h)).abs() < 1e-6);
            assert!((hs[1][0] - (gxp[1] - gxm[1]) / (2.0 * h)).abs() < 1e-6);
            assert!((hs[1][1] - (gyp[1] - gym[1]) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn optimum_location() {
        let r = maximize_f().unwrap();
        assert!((r.x_star - 0.675).abs() < 5e-3);
        assert!((r.y_star - 0.652).abs() < 5e-3);
        assert!((r.f_star - 0.0411).abs() < 5e-4);
        assert!((2.0 * r.f_star - 0.0822).abs() < 5e-4);
        assert!(r.gradient_norm < GRADIENT_TOLERANCE);
    }

    #[test]
    fn every_registered_maximizer_finds_the_peak() {
        let reg = MaximizerRegistry::with_defaults();
        let best = maximize_f().unwrap();
        for name in reg.names() {
            let r = maximize_with(&reg, name).unwrap();
            assert!((r.f_star - best.f_star).abs() < 1e-6, "{name}");
        }
    }

    #[test]
    fn bound_values_and_scaling() {
        let g = g_on_max(15.0, 10.0).unwrap();
        assert!((g * 1e3 - 12.33).abs() < 0.01);
        assert!((g_on_max(30.0, 10.0).unwrap() - 2.0 * g).abs() < 1e-15);
        assert!((g_on_max(15.0, 20.0).unwrap() - g / 4.0).abs() < 1e-15);
        let t1 = g_on_max_from_qubit(4.811, 8.0, ROUNDED_QUBIT_COEFFICIENT).unwrap();
        assert!((t1 * 1e3 - 14.06).abs() < 0.01);
        assert!(g_on_max(-1.0, 10.0).is_err());
    }

    #[test]
    fn params_for_optimum() {
        let p = xy(0.675, 0.652);
        let above = params_from_xy(p, 15.0, 10.0, SubRegime::OnAboveOff).unwrap();
        let below = params_from_xy(p, 15.0, 10.0, SubRegime::OnBelowOff).unwrap();
        assert!((above.a - 1.84).abs() < 5e-3);
        assert!((below.a - 1.24).abs() < 5e-3);
        assert!((above.b_abs / 100.0 - 6.39).abs() < 0.01);
        assert_eq!(above.b_abs, below.b_abs);
        let lr = params_from_xy(xy(0.8, 0.652), 12.5, 8.0, SubRegime::OnBelowOff).unwrap();
        assert!((lr.b_abs - 1280.0).abs() < 1e-9);
        assert!((lr.a - 1.374).abs() < 1e-3);
    }

    #[test]
    fn xy_inverse_map() {
        let p = xy_from_design(6.61, 9.78, 15.0).unwrap();
        assert!((p.x() - 0.6759).abs() < 1e-4);
        assert!((p.y() - 0.652).abs() < 1e-4);
        let p = xy_from_design(6.5, 8.2, 12.6).unwrap();
        assert!((p.x() - 0.793).abs() < 1e-3);
        assert!((p.y() - 0.651).abs() < 1e-3);
        assert!(xy_from_design(7.0, 6.0, 15.0).is_err());
    }
}
