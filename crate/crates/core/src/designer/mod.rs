//! Layout design: from a regime, β_s and frequency ceiling to a capacitance
//! set that realises the maximal turned-on coupling.
//!
//! The pipeline is targets → capacitance solve → energy extraction →
//! frequency assignment → Josephson targets → feasibility check.

mod parameters;
mod solver;

use serde::{Deserialize, Serialize};

pub use parameters::{
    network_file, CapParameter, CapSlot, ParameterKind, ParameterizedNetwork, TopologySpec, PRESETS,
};
pub use solver::{solve_system, EquationSystem, SolveOutcome, SolverOptions};

use crate::bound::{self, params_from_xy, XYPoint};
use crate::capnet::{extract_energies, NetworkFile, QcqEnergies};
use crate::constants::PhysConstants;
use crate::coupling::{
    dispersive_beta, ej_for_frequency, omega_off, simplified_g, zero_coupling_feasible,
    Feasibility, SubRegime,
};
use crate::error::{QcqError, Result};
use crate::sweep::{linspace, sweep_coupling, Sweep, DEFAULT_POINTS, POLE_MARGIN_GHZ};

/// Sign of E₁₂ (equivalently of B) to design for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignCase {
    Positive,
    Negative,
    Both,
}

impl SignCase {
    pub fn signs(self) -> Vec<Sign> {
        match self {
            SignCase::Positive => vec![Sign::Positive],
            SignCase::Negative => vec![Sign::Negative],
            SignCase::Both => vec![Sign::Positive, Sign::Negative],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Constraint {
    /// Qubit charging energy (geometric mean over the two qubits), GHz.
    ECqTarget {
        #[serde(rename = "value_GHz")]
        value: f64,
    },
    /// A capacitance held at a fixed value, addressed by parameter name or
    /// by a node / node pair it covers.
    FixedCapacitance {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parameter: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<CapSlot>,
        #[serde(rename = "value_fF")]
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub topology: TopologySpec,
    pub regime: SubRegime,
    pub beta_s: f64,
    /// Frequency ceiling. Exactly one of this and `omega_q_GHz` is given.
    #[serde(
        rename = "omega_l_GHz",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub omega_l: Option<f64>,
    /// Qubit frequency; ω_l then follows as ω_q/(xy).
    #[serde(
        rename = "omega_q_GHz",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub omega_q: Option<f64>,
    pub e12_sign: SignCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xy: Option<[f64; 2]>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl DesignSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| {
            QcqError::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        if let Some(v) = spec.schema_version {
            if v != 1 {
                return Err(QcqError::Parse(format!("unsupported schema_version {v}")));
            }
        }
        Ok(spec)
    }

    /// Design point: given or the interior optimum of f.
    pub fn xy_point(&self) -> Result<XYPoint> {
        match self.xy {
            Some([x, y]) => XYPoint::new(x, y),
            None => Ok(bound::maximize_f()?.xy()),
        }
    }

    pub fn omega_l(&self, xy: XYPoint) -> Result<f64> {
        let w = match (self.omega_l, self.omega_q) {
            (Some(l), None) => l,
            (None, Some(q)) => q / (xy.x() * xy.y()),
            _ => {
                return Err(QcqError::InvalidParameter(
                    "give exactly one of omega_l_GHz and omega_q_GHz".into(),
                ))
            }
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(QcqError::InvalidParameter(format!(
                "ω_l must be positive, got {w}"
            )));
        }
        Ok(w)
    }

    fn check(&self) -> Result<()> {
        if !(self.beta_s.is_finite() && self.beta_s >= 1.0) {
            return Err(QcqError::InvalidParameter(format!(
                "β_s must be at least 1, got {}",
                self.beta_s
            )));
        }
        Ok(())
    }

    /// Parameterized network and the equation system for targets (A*, B*).
    pub fn equation_system(
        &self,
        network: &ParameterizedNetwork,
        a: f64,
        b: f64,
    ) -> Result<EquationSystem> {
        let mut e_cq = Vec::new();
        let mut fixed: Vec<(usize, f64)> = Vec::new();
        for c in &self.constraints {
            match c {
                Constraint::ECqTarget { value } => e_cq.push(*value),
                Constraint::FixedCapacitance {
                    parameter,
                    nodes,
                    value,
                } => {
                    let index = match (parameter, nodes) {
                        (Some(name), None) => network.parameter_index(name).ok_or_else(|| {
                            QcqError::InvalidParameter(format!("unknown parameter `{name}`"))
                        })?,
                        (None, Some(slot)) => network.parameter_of_slot(slot).ok_or_else(|| {
                            QcqError::InvalidParameter(format!(
                                "no parameter covers capacitance {slot:?}"
                            ))
                        })?,
                        _ => {
                            return Err(QcqError::Parse(
                                "fixed_capacitance needs exactly one of `parameter` and `nodes`"
                                    .into(),
                            ))
                        }
                    };
                    if fixed.iter().any(|&(i, _)| i == index) {
                        return Err(QcqError::InvalidParameter(format!(
                            "parameter `{}` fixed twice",
                            network.parameters()[index].name
                        )));
                    }
                    fixed.push((index, *value));
                }
            }
        }
        Ok(EquationSystem { a, b, e_cq, fixed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub sign: Sign,
    pub a: f64,
    pub b: f64,
}

/// (A*, B*) for each requested sign of E₁₂.
pub fn targets(
    regime: SubRegime,
    sign_case: SignCase,
    beta_s: f64,
    xy: Option<XYPoint>,
) -> Result<Vec<Targets>> {
    let xy = match xy {
        Some(p) => p,
        None => bound::maximize_f()?.xy(),
    };
    // ω_l only scales frequencies; A and B do not depend on it.
    let p = params_from_xy(xy, 1.0, beta_s, regime)?;
    Ok(sign_case
        .signs()
        .into_iter()
        .map(|sign| Targets {
            sign,
            a: p.a,
            b: sign.value() * p.b_abs,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega_q: f64,
    pub omega_s: f64,
    pub omega_l: f64,
    pub omega_on: f64,
    pub omega_off: f64,
}

/// Frequencies of the design point and |g_on| = (2ω_l/β_s²)·f(x, y).
pub fn assign_frequencies(
    xy: XYPoint,
    omega_l: f64,
    beta_s: f64,
    regime: SubRegime,
) -> Result<(Frequencies, f64)> {
    let p = params_from_xy(xy, omega_l, beta_s, regime)?;
    let (omega_on, omega_off) = regime.on_off(p.omega_s, omega_l);
    let g = bound::g_on(xy, omega_l, beta_s)?;
    Ok((
        Frequencies {
            omega_q: p.omega_q,
            omega_s: p.omega_s,
            omega_l,
            omega_on,
            omega_off,
        },
        g,
    ))
}

/// Sign of g_on: the turned-on point lies on the side of the zero crossing
/// where the mediated term dominates (below) or the direct term does (above).
pub fn g_on_sign(regime: SubRegime, sign: Sign) -> f64 {
    let side = match regime {
        SubRegime::OnAboveOff => 1.0,
        SubRegime::OnBelowOff => -1.0,
    };
    side * sign.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JosephsonTargets {
    /// GHz.
    pub e_j1: f64,
    pub e_j2: f64,
    pub e_jc_on: f64,
    pub e_jc_off: f64,
    /// nH.
    pub l_j1: f64,
    pub l_j2: f64,
    pub l_jc_on: f64,
    pub l_jc_off: f64,
}

/// Junction energies and inductances realising the assigned frequencies.
pub fn josephson_targets(
    f: &Frequencies,
    e: &QcqEnergies,
    constants: &PhysConstants,
) -> Result<JosephsonTargets> {
    let e_j1 = ej_for_frequency(f.omega_q, e.e_c1)?;
    let e_j2 = ej_for_frequency(f.omega_q, e.e_c2)?;
    let e_jc_on = ej_for_frequency(f.omega_on, e.e_cc)?;
    let e_jc_off = ej_for_frequency(f.omega_off, e.e_cc)?;
    let l = |ej: f64| constants.inductance_from_ej(ej);
    Ok(JosephsonTargets {
        e_j1,
        e_j2,
        e_jc_on,
        e_jc_off,
        l_j1: l(e_j1),
        l_j2: l(e_j2),
        l_jc_on: l(e_jc_on),
        l_jc_off: l(e_jc_off),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Achieved {
    pub a: f64,
    pub b: f64,
    pub e_cq: f64,
    pub e_c1: f64,
    pub e_c2: f64,
    pub e_cc: f64,
    pub e_1c: f64,
    pub e_2c: f64,
    pub e_12: f64,
}

impl From<QcqEnergies> for Achieved {
    fn from(e: QcqEnergies) -> Self {
        Self {
            a: e.a,
            b: e.b,
            e_cq: e.e_cq(),
            e_c1: e.e_c1,
            e_c2: e.e_c2,
            e_cc: e.e_cc,
            e_1c: e.e_1c,
            e_2c: e.e_2c,
            e_12: e.e_12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedDesign {
    /// Parameter name → value, fF, in parameter order.
    pub capacitances: Vec<(String, f64)>,
    pub network: NetworkFile,
    pub achieved: Achieved,
    /// Relative residuals of A, B and each E_Cq target.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    /// simplified_g at the achieved A, B and (ω_q, ω_on), GHz.
    pub g_on_achieved: f64,
    /// Zero crossing implied by the achieved A, GHz.
    pub omega_off_achieved: f64,
    pub feasibility: Feasibility,
    pub josephson: JosephsonTargets,
    pub sweep: Sweep,
}

impl SolvedDesign {
    pub fn capacitance(&self, name: &str) -> Option<f64> {
        self.capacitances
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub targets: Targets,
    /// Signed predicted g_on, GHz.
    pub g_on_predicted: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolvedDesign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub schema_version: u32,
    pub regime: SubRegime,
    pub beta_s: f64,
    pub xy: [f64; 2],
    pub frequencies: Frequencies,
    /// |g_on| from the bound formula, GHz.
    pub g_on_magnitude: f64,
    /// β at ω_s for the target |B|.
    pub beta_floor: f64,
    pub cases: Vec<CaseReport>,
}

impl DesignReport {
    /// Cases that produced a positive capacitance set.
    pub fn solved(&self) -> impl Iterator<Item = (&CaseReport, &SolvedDesign)> {
        self.cases
            .iter()
            .filter_map(|c| c.solution.as_ref().map(|s| (c, s)))
    }

    pub fn case(&self, sign: Sign) -> Option<&CaseReport> {
        self.cases.iter().find(|c| c.targets.sign == sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    pub constants: PhysConstants,
    pub solver: SolverOptions,
    pub sweep_points: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            constants: PhysConstants::codata(),
            solver: SolverOptions::default(),
            sweep_points: DEFAULT_POINTS,
        }
    }
}

/// Run the whole procedure. Fails with `Infeasible` when no requested sign
/// yields a solution; with two signs a failing one is reported in its case.
pub fn run_design(spec: &DesignSpec, opts: &DesignOptions) -> Result<DesignReport> {
    spec.check().map_err(QcqError::at("spec"))?;
    let network = spec.topology.resolve().map_err(QcqError::at("topology"))?;
    let xy = spec.xy_point().map_err(QcqError::at("bound"))?;
    let omega_l = spec.omega_l(xy).map_err(QcqError::at("spec"))?;
    let all_targets = targets(spec.regime, spec.e12_sign, spec.beta_s, Some(xy))
        .map_err(QcqError::at("targets"))?;
    let (freqs, g_mag) = assign_frequencies(xy, omega_l, spec.beta_s, spec.regime)
        .map_err(QcqError::at("frequencies"))?;
    let beta_floor = dispersive_beta(all_targets[0].b, freqs.omega_q, freqs.omega_s)
        .map_err(QcqError::at("frequencies"))?;

    let mut cases = Vec::new();
    let mut last_err = None;
    for t in all_targets {
        let g_on_predicted = g_on_sign(spec.regime, t.sign) * g_mag;
        let solved = spec
            .equation_system(&network, t.a, t.b)
            .map_err(QcqError::at("constraints"))
            .and_then(|sys| solve_case(&network, &sys, &freqs, spec.beta_s, opts));
        match solved {
            Ok(s) => cases.push(CaseReport {
                targets: t,
                g_on_predicted,
                solution: Some(s),
                failure: None,
            }),
            Err(e) => {
                if matches!(e.root(), QcqError::InvalidParameter(_) | QcqError::Parse(_)) {
                    return Err(e);
                }
                cases.push(CaseReport {
                    targets: t,
                    g_on_predicted,
                    solution: None,
                    failure: Some(e.to_string()),
                });
                last_err = Some(e);
            }
        }
    }
    if cases.iter().all(|c| c.solution.is_none()) {
        return Err(last_err.expect("at least one case"));
    }
    Ok(DesignReport {
        schema_version: 1,
        regime: spec.regime,
        beta_s: spec.beta_s,
        xy: [xy.x(), xy.y()],
        frequencies: freqs,
        g_on_magnitude: g_mag,
        beta_floor,
        cases,
    })
}

fn solve_case(
    network: &ParameterizedNetwork,
    system: &EquationSystem,
    freqs: &Frequencies,
    beta_s: f64,
    opts: &DesignOptions,
) -> Result<SolvedDesign> {
    let c = &opts.constants;
    let out = solve_system(network, system, c, &opts.solver).map_err(QcqError::at("solve"))?;
    let net = network
        .build(&out.values)
        .map_err(QcqError::at("extract"))?;
    let e = extract_energies(&net, c)
        .and_then(|s| s.qcq())
        .map_err(QcqError::at("extract"))?;
    let g_on_achieved = simplified_g(e.a, e.b, freqs.omega_q, freqs.omega_on)
        .map_err(QcqError::at("frequencies"))?;
    let omega_off_achieved = omega_off(e.a, freqs.omega_q).map_err(QcqError::at("frequencies"))?;
    let josephson = josephson_targets(freqs, &e, c).map_err(QcqError::at("josephson"))?;
    let feasibility =
        zero_coupling_feasible(e.a, e.b, beta_s).map_err(QcqError::at("feasibility"))?;
    let grid = linspace(
        freqs.omega_q + POLE_MARGIN_GHZ,
        freqs.omega_l,
        opts.sweep_points,
    )
    .map_err(QcqError::at("sweep"))?;
    Ok(SolvedDesign {
        capacitances: network
            .parameters()
            .iter()
            .zip(&out.values)
            .map(|(p, &v)| (p.name.clone(), v))
            .collect(),
        network: NetworkFile::from_network(&net),
        achieved: e.into(),
        residuals: out.residuals,
        iterations: out.iterations,
        restarts: out.restarts,
        g_on_achieved,
        omega_off_achieved,
        feasibility,
        josephson,
        sweep: sweep_coupling(e.a, e.b, freqs.omega_q, &grid),
    })
}
