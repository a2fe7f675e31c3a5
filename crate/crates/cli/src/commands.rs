use std::path::Path;

use qcq_core::bound::{self, maximize_f, ROUNDED_QUBIT_COEFFICIENT};
use qcq_core::capnet::{extract_energies, EnergySet, NetworkFile};
use qcq_core::coupling::{omega_off, zero_coupling_feasible};
use qcq_core::designer::{run_design, DesignOptions, DesignSpec, Sign};
use qcq_core::oracle::{verify_sweep, OracleRegistry};
use qcq_core::sweep::{linspace, sweep_coupling, DEFAULT_POINTS};
use qcq_core::{PhysConstants, QcqError};
use serde_json::{json, Value};

use crate::output::{read_to_string, to_json, write_atomic};
use crate::CliError;

/// Qubit frequency used by `verify` when none is given, GHz.
pub const DEFAULT_OMEGA_Q: f64 = 6.0;

/// Points of the default `verify` sweep.
const VERIFY_POINTS: usize = 41;

/// Allowed relative ω01 offset of a lone element.
const ELEMENT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

pub fn parse_sweep(s: &str) -> Result<SweepArg, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo:hi:n, got `{s}`"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let arg = SweepArg {
        lo: num(lo)?,
        hi: num(hi)?,
        n: n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?,
    };
    if !(arg.lo < arg.hi) || arg.n < 2 {
        return Err(format!("need lo < hi and n >= 2, got `{s}`"));
    }
    Ok(arg)
}

fn grid(sweep: Option<SweepArg>, omega_q: f64, points: usize) -> Result<Vec<f64>, CliError> {
    let s = sweep.unwrap_or(SweepArg {
        lo: omega_q + 0.5,
        hi: 2.5 * omega_q,
        n: points,
    });
    Ok(linspace(s.lo, s.hi, s.n)?)
}

fn load_energies(path: &Path, k: &PhysConstants) -> Result<EnergySet, CliError> {
    let file = NetworkFile::from_json(&read_to_string(path)?)?;
    Ok(extract_energies(&file.to_network()?, k)?)
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(QcqError::InvalidParameter(format!("{name} must be positive, got {v}")).into())
    }
}

fn energies_json(e: &EnergySet) -> Value {
    let ids = e.element_ids();
    let charging: serde_json::Map<String, Value> = ids
        .iter()
        .zip(e.charging())
        .map(|(id, v)| (id.clone(), json!(v)))
        .collect();
    let mut coupling = Vec::new();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            coupling.push(json!({"a": ids[i], "b": ids[j], "value": e.coupling()[(i, j)]}));
        }
    }
    json!({"charging_GHz": charging, "coupling_GHz": coupling})
}

pub fn analyze(
    network: &Path,
    omega_q: f64,
    sweep: Option<SweepArg>,
    output: &Path,
) -> Result<(), CliError> {
    check_positive("--wq", omega_q)?;
    let k = PhysConstants::codata();
    let e = load_energies(network, &k)?;
    let q = e.qcq()?;
    let omega_c = grid(sweep, omega_q, DEFAULT_POINTS)?;
    let s = sweep_coupling(q.a, q.b, omega_q, &omega_c);
    let zero = omega_off(q.a, omega_q).ok();
    let report = json!({
        "schema_version": 1,
        "omega_q_GHz": omega_q,
        "energies": energies_json(&e),
        "qcq": {
            "E_C1_GHz": q.e_c1, "E_C2_GHz": q.e_c2, "E_Cc_GHz": q.e_cc,
            "E_1c_GHz": q.e_1c, "E_2c_GHz": q.e_2c, "E_12_GHz": q.e_12,
            "E_Cq_GHz": q.e_cq(), "A": q.a, "B": q.b,
        },
        "omega_off_GHz": zero,
        "sweep": {
            "file": "sweep.csv",
            "points": omega_c.len(),
            "flagged_rows": s.flagged(),
            "zero_crossings_GHz": s.zero_crossings(),
        },
    });
    write_atomic(output, "sweep.csv", &s.to_csv())?;
    write_atomic(output, "report.json", &to_json(&report))?;
    println!(
        "E_Cq = {:.2} MHz, E_Cc = {:.2} MHz",
        1e3 * q.e_cq(),
        1e3 * q.e_cc
    );
    println!("A = {:.6}, B = {:.4}", q.a, q.b);
    match zero {
        Some(w) => println!("omega_off = {w:.4} GHz"),
        None => println!("omega_off: none (A <= 1)"),
    }
    println!(
        "sweep: {} points, {} flagged, written to {}",
        omega_c.len(),
        s.flagged(),
        output.display()
    );
    Ok(())
}

pub fn check_zero(network: &Path, beta_s: f64, as_json: bool) -> Result<(), CliError> {
    check_positive("--beta-s", beta_s)?;
    let k = PhysConstants::codata();
    let q = load_energies(network, &k)?.qcq()?;
    let v = zero_coupling_feasible(q.a, q.b, beta_s)?;
    if as_json {
        print!(
            "{}",
            to_json(&json!({
                "schema_version": 1,
                "A": v.a,
                "B_abs": v.b_abs,
                "beta_s": v.beta_s,
                "band": [1.0, v.upper_limit],
                "feasible": v.feasible,
                "reason": v.reason(),
            }))
        );
    } else {
        println!("A = {:.6}", v.a);
        println!("|B| = {:.4}", v.b_abs);
        println!(
            "band: 1 < A <= {:.6} (beta_s = {})",
            v.upper_limit, v.beta_s
        );
        println!(
            "{}: {}",
            if v.feasible { "feasible" } else { "infeasible" },
            v.reason()
        );
    }
    if v.feasible {
        Ok(())
    } else {
        Err(CliError::Infeasible(v.reason()))
    }
}

pub fn bound(
    omega_l: Option<f64>,
    beta_s: f64,
    omega_q: &[f64],
    exact: bool,
    as_json: bool,
) -> Result<(), CliError> {
    if omega_l.is_none() && omega_q.is_empty() {
        return Err(QcqError::InvalidParameter("give --omega-l and/or --omega-q".into()).into());
    }
    let r = maximize_f()?;
    let g_max = omega_l.map(|w| r.g_on_max(w, beta_s)).transpose()?;
    let coefficient = if exact {
        r.qubit_coefficient()
    } else {
        ROUNDED_QUBIT_COEFFICIENT
    };
    let estimates = omega_q
        .iter()
        .map(|&w| Ok((w, bound::g_on_max_from_qubit(w, beta_s, coefficient)?)))
        .collect::<Result<Vec<_>, QcqError>>()?;
    if as_json {
        print!(
            "{}",
            to_json(&json!({
                "schema_version": 1,
                "x_star": r.x_star,
                "y_star": r.y_star,
                "f_star": r.f_star,
                "beta_s": beta_s,
                "omega_l_GHz": omega_l,
                "g_on_max_MHz": g_max.map(|g| 1e3 * g),
                "qubit_coefficient": coefficient,
                "qubit_estimates": estimates
                    .iter()
                    .map(|(w, g)| json!({"omega_q_GHz": w, "g_on_max_MHz": 1e3 * g}))
                    .collect::<Vec<_>>(),
            }))
        );
        return Ok(());
    }
    println!(
        "x* = {:.6}, y* = {:.6}, f* = {:.6}",
        r.x_star, r.y_star, r.f_star
    );
    if let (Some(w), Some(g)) = (omega_l, g_max) {
        println!(
            "g_on_max(omega_l = {w} GHz, beta_s = {beta_s}) = {:.4} MHz",
            1e3 * g
        );
    }
    for (w, g) in &estimates {
        println!(
            "omega_q = {w} GHz: g_on_max = {:.2} MHz ({coefficient:.5} omega_q / beta_s^2)",
            1e3 * g
        );
    }
    Ok(())
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("QCQ_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| QcqError::Parse(format!("QCQ_SEED `{v}`: {e}")).into()),
        Err(_) => Ok(0),
    }
}

pub fn design(spec_path: &Path, output: &Path) -> Result<(), CliError> {
    let spec = DesignSpec::from_json(&read_to_string(spec_path)?)?;
    let mut opts = DesignOptions::default();
    opts.solver.seed = seed_from_env()?;
    let report = run_design(&spec, &opts)?;
    for (case, sol) in report.solved() {
        let name = match case.targets.sign {
            Sign::Positive => "sweep_positive.csv",
            Sign::Negative => "sweep_negative.csv",
        };
        write_atomic(output, name, &sol.sweep.to_csv())?;
    }
    let value = serde_json::to_value(&report).expect("report serializes");
    write_atomic(output, "report.json", &to_json(&value))?;

    let f = &report.frequencies;
    println!(
        "{}: omega_q = {:.4}, omega_on = {:.4}, omega_off = {:.4} GHz, |g_on| = {:.3} MHz",
        report.regime.label(),
        f.omega_q,
        f.omega_on,
        f.omega_off,
        1e3 * report.g_on_magnitude
    );
    for case in &report.cases {
        let sign = match case.targets.sign {
            Sign::Positive => "E12 > 0",
            Sign::Negative => "E12 < 0",
        };
        match (&case.solution, &case.failure) {
            (Some(sol), _) => {
                let caps: Vec<String> = sol
                    .capacitances
                    .iter()
                    .map(|(n, v)| format!("{n} = {v:.4}"))
                    .collect();
                println!(
                    "{sign}: {} fF; g_on = {:+.3} MHz",
                    caps.join(", "),
                    1e3 * case.g_on_predicted
                );
            }
            (None, Some(why)) => println!("{sign}: {why}"),
            (None, None) => println!("{sign}: no solution"),
        }
    }
    println!("written to {}", output.display());
    if report.solved().next().is_none() {
        return Err(CliError::Infeasible(
            "no sign case of the spec is realisable".into(),
        ));
    }
    Ok(())
}

pub fn verify(
    network: &Path,
    method: &str,
    omega_q: f64,
    sweep: Option<SweepArg>,
    beta_min: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    check_positive("--wq", omega_q)?;
    let k = PhysConstants::codata();
    let registry = OracleRegistry::with_defaults();
    let oracle = registry.get(method)?;
    let e = load_energies(network, &k)?;

    let (report, pass) = if e.element_ids().len() == 1 {
        let e_c = e.charging()[0];
        let c = oracle.single_element(e_c, omega_q, &k)?;
        let deviation = (c.omega_oracle - omega_q).abs() / omega_q;
        let pass = deviation <= ELEMENT_TOLERANCE;
        println!("method {method}: E_C = {:.2} MHz", 1e3 * e_c);
        println!(
            "omega_01 = {:.6} GHz vs target {omega_q} GHz (deviation {:.3}%)",
            c.omega_oracle,
            100.0 * deviation
        );
        if let Some(a) = c.anharmonicity {
            println!(
                "anharmonicity = {:.2} MHz (-E_C = {:.2} MHz)",
                1e3 * a,
                -1e3 * e_c
            );
        }
        let report = json!({
            "schema_version": 1,
            "method": method,
            "element": e.element_ids()[0],
            "E_C_GHz": e_c,
            "omega_target_GHz": omega_q,
            "omega_01_GHz": c.omega_oracle,
            "anharmonicity_GHz": c.anharmonicity,
            "deviation": deviation,
            "tolerance": ELEMENT_TOLERANCE,
            "pass": pass,
        });
        (report, pass)
    } else {
        let omega_c = grid(sweep, omega_q, VERIFY_POINTS)?;
        let r = verify_sweep(oracle, &e, omega_q, &omega_c, beta_min, &k)?;
        println!("omega_c_GHz,beta,g_theory_MHz,g_oracle_MHz,deviation,scaled_deviation,checked");
        let opt = |v: Option<f64>| v.map_or("nan".to_string(), |v| format!("{v:.6}"));
        for row in &r.rows {
            println!(
                "{:.6},{:.4},{:.6},{},{},{},{}",
                row.omega_c,
                row.beta,
                1e3 * row.g_theory,
                opt(row.g_oracle.map(|g| 1e3 * g)),
                opt(row.deviation),
                opt(row.scaled_deviation),
                row.checked
            );
        }
        println!(
            "max scaled deviation (beta >= {beta_min}): {:.3}% (tolerance {:.0}%)",
            100.0 * r.max_scaled_deviation,
            100.0 * r.tolerance
        );
        match (r.zero_theory, r.zero_oracle) {
            (Some(t), Some(o)) => println!(
                "zero crossing: oracle {o:.4} GHz, formula {t:.4} GHz ({:.3}%)",
                100.0 * (o - t).abs() / t
            ),
            (Some(t), None) => println!("zero crossing: formula {t:.4} GHz, none in oracle sweep"),
            (None, Some(o)) => println!("zero crossing: oracle {o:.4} GHz, formula has none"),
            (None, None) => println!("zero crossing: none"),
        }
        let pass = r.pass;
        let mut value = serde_json::to_value(&r).expect("report serializes");
        value["schema_version"] = json!(1);
        (value, pass)
    };
    if let Some(dir) = output {
        write_atomic(dir, "verify.json", &to_json(&report))?;
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "{method} oracle disagrees with the coupling formula beyond tolerance"
        )))
    }
}
