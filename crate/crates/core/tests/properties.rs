mod common;

use proptest::prelude::*;
use qcq_core::bound::{
    self, maximize_f, maximize_with, params_from_xy, MaximizerRegistry, XYPoint,
};
use qcq_core::capnet::{
    closed_form_ggg, extract_energies, fgf_long_range, flip_node_sign, gfg_long_range,
    ggg_symmetric, CapacitanceNetwork, FgfCaps, GfgCaps, GggCaps,
};
use qcq_core::coupling::{dispersive_beta, simplified_g, SubRegime};
use qcq_core::designer::{run_design, DesignOptions, DesignSpec, Sign};
use qcq_core::oracle::{linear_ej, normal_modes, LinearCircuit};
use qcq_core::{PhysConstants, QcqError};

use common::*;

fn ggg_caps() -> impl Strategy<Value = GggCaps> {
    (20.0..200.0f64, 20.0..200.0f64, 0.5..20.0f64, 0.0..5.0f64)
        .prop_map(|(c0q, c0c, cqc, cqq)| GggCaps { c0q, c0c, cqc, cqq })
}

fn gfg_caps() -> impl Strategy<Value = GfgCaps> {
    (
        5.0..30.0f64,
        2.0..20.0f64,
        0.01..2.0f64,
        40.0..150.0f64,
        100.0..400.0f64,
        300.0..1000.0f64,
    )
        .prop_map(|(c12, c1q, c2q, c0q, c01, c02)| GfgCaps {
            c12,
            c1q,
            c2q,
            c0q,
            c01,
            c02,
        })
}

fn network() -> impl Strategy<Value = CapacitanceNetwork> {
    prop_oneof![
        ggg_caps().prop_map(|c| ggg_symmetric(c).unwrap()),
        gfg_caps().prop_map(|c| gfg_long_range(c).unwrap()),
    ]
}

fn regime() -> impl Strategy<Value = SubRegime> {
    prop_oneof![Just(SubRegime::OnBelowOff), Just(SubRegime::OnAboveOff)]
}

fn mode_frequencies(net: &CapacitanceNetwork) -> Vec<f64> {
    let k = PhysConstants::codata();
    let e = extract_energies(net, &k).unwrap();
    let roles = e.roles().unwrap();
    let ej: Vec<f64> = e
        .charging()
        .iter()
        .enumerate()
        .map(|(i, &ec)| linear_ej(if i == roles.coupler { 8.3 } else { 5.9 }, ec).unwrap())
        .collect();
    normal_modes(&LinearCircuit::from_energies(&e, &ej, &k).unwrap())
        .unwrap()
        .modes
        .into_iter()
        .map(|m| m.frequency)
        .collect()
}

proptest! {
    #![proptest_config(seeded(200))]

    #[test]
    fn node_flips_are_a_gauge(net in network(), mask in proptest::collection::vec(any::<bool>(), 6)) {
        let k = PhysConstants::codata();
        let mut flipped = net.clone();
        for (node, &flip) in net.topology().node_names().iter().zip(&mask) {
            if flip {
                flipped = flip_node_sign(&flipped, node).unwrap();
            }
        }
        let e0 = extract_energies(&net, &k).unwrap();
        let e1 = extract_energies(&flipped, &k).unwrap();
        for (a, b) in e0.charging().iter().zip(e1.charging()) {
            prop_assert!(rel(*a, *b) < 1e-12);
        }
        for (a, b) in e0.coupling().iter().zip(e1.coupling().iter()) {
            prop_assert!(rel(a.abs(), b.abs()) < 1e-12);
        }
        let (q0, q1) = (e0.qcq().unwrap(), e1.qcq().unwrap());
        prop_assert!(rel(q0.a, q1.a) < 1e-12);
        prop_assert!(rel(q0.b.abs(), q1.b.abs()) < 1e-12);
        for wc in [7.0, 9.5, 13.0] {
            let g0 = simplified_g(q0.a, q0.b, 5.9, wc).unwrap();
            let g1 = simplified_g(q1.a, q1.b, 5.9, wc).unwrap();
            prop_assert!(rel(g0.abs(), g1.abs()) < 1e-12);
        }
        for (a, b) in mode_frequencies(&net).iter().zip(mode_frequencies(&flipped)) {
            prop_assert!(rel(*a, b) < 1e-12);
        }
    }

    #[test]
    fn single_qubit_flip_negates_its_couplings(caps in ggg_caps()) {
        let k = PhysConstants::codata();
        let net = ggg_symmetric(caps).unwrap();
        let e0 = extract_energies(&net, &k).unwrap().qcq().unwrap();
        let e1 = extract_energies(&flip_node_sign(&net, "q1").unwrap(), &k)
            .unwrap()
            .qcq()
            .unwrap();
        prop_assert!(rel(e1.e_1c, -e0.e_1c) < 1e-12);
        prop_assert!(rel(e1.e_12, -e0.e_12) < 1e-12);
        prop_assert!(rel(e1.e_2c, e0.e_2c) < 1e-12);
        prop_assert!(rel(e1.a, e0.a) < 1e-12);
        prop_assert!(rel(e1.b, -e0.b) < 1e-12);
    }

    #[test]
    fn double_flip_is_identity(net in network()) {
        let k = PhysConstants::codata();
        let twice = flip_node_sign(&flip_node_sign(&net, "q2").unwrap(), "q2").unwrap();
        let (a, b) = (extract_energies(&net, &k).unwrap(), extract_energies(&twice, &k).unwrap());
        prop_assert_eq!(a.charging(), b.charging());
        prop_assert_eq!(a.coupling(), b.coupling());
    }

    #[test]
    fn scaling_capacitances(net in network(), lambda in 0.05..20.0f64) {
        let k = PhysConstants::codata();
        let e0 = extract_energies(&net, &k).unwrap();
        let e1 = extract_energies(&net.scaled(lambda).unwrap(), &k).unwrap();
        for (a, b) in e0.charging().iter().zip(e1.charging()) {
            prop_assert!(rel(a / lambda, *b) < 1e-12);
        }
        for (a, b) in e0.coupling().iter().zip(e1.coupling().iter()) {
            prop_assert!(rel(a / lambda, *b) < 1e-12);
        }
        let (q0, q1) = (e0.qcq().unwrap(), e1.qcq().unwrap());
        prop_assert!(rel(q0.a, q1.a) < 1e-12);
        prop_assert!(rel(q0.b, q1.b) < 1e-12);
    }

    #[test]
    fn closed_form_matches_matrix_path(caps in ggg_caps()) {
        let k = PhysConstants::codata();
        let cf = closed_form_ggg(caps, &k).unwrap();
        let m = extract_energies(&ggg_symmetric(caps).unwrap(), &k).unwrap().qcq().unwrap();
        prop_assert!(rel(cf.a, m.a) < 1e-10);
        prop_assert!(rel(cf.b, m.b) < 1e-10);
        prop_assert!(rel(cf.e_cq, m.e_cq()) < 1e-10);
    }

    #[test]
    fn fgf_without_qubit_mutual_has_unit_a(
        c in proptest::collection::vec(1.0..150.0f64, 11)
    ) {
        let caps = FgfCaps {
            c01: c[0], c02: c[1], c12: c[2], c1c: c[3] / 10.0, c2c: c[4] / 10.0, c0c: c[5],
            c3c: c[6] / 10.0, c4c: c[7] / 10.0, c03: c[8], c04: c[9], c34: c[10],
        };
        let k = PhysConstants::codata();
        let e = extract_energies(&fgf_long_range(caps, 0.0).unwrap(), &k).unwrap().qcq().unwrap();
        prop_assert!((e.a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bound_parametrization_reproduces_g_on_and_beta(
        x in 0.02..0.98f64,
        y in 0.02..0.98f64,
        omega_l in 4.0..30.0f64,
        beta_s in 1.0..30.0f64,
        regime in regime(),
    ) {
        let p = params_from_xy(XYPoint::new(x, y).unwrap(), omega_l, beta_s, regime).unwrap();
        let (omega_on, omega_off) = regime.on_off(p.omega_s, omega_l);
        let g = simplified_g(p.a, p.b_abs, p.omega_q, omega_on).unwrap();
        prop_assert!(rel(g.abs(), 2.0 * omega_l / (beta_s * beta_s) * f_reference(x, y)) < 1e-9);
        prop_assert!(rel(dispersive_beta(p.b_abs, p.omega_q, p.omega_s).unwrap(), beta_s) < 1e-9);
        // The turned-off point is a zero of g.
        let g_off = simplified_g(p.a, p.b_abs, p.omega_q, omega_off).unwrap();
        prop_assert!(g_off.abs() < 1e-9 * g.abs().max(1e-12) + 1e-12);
    }

    #[test]
    fn beta_stays_above_floor_between_critical_points(
        x in 0.05..0.95f64,
        y in 0.05..0.95f64,
        omega_l in 4.0..30.0f64,
        beta_s in 1.0..30.0f64,
        t in 0.0..=1.0f64,
    ) {
        let p = params_from_xy(XYPoint::new(x, y).unwrap(), omega_l, beta_s, SubRegime::OnBelowOff).unwrap();
        let wc = p.omega_s + t * (omega_l - p.omega_s);
        prop_assert!(dispersive_beta(p.b_abs, p.omega_q, wc).unwrap() >= beta_s * (1.0 - 1e-12));
    }

    #[test]
    fn f_never_exceeds_optimum(x in 0.001..0.999f64, y in 0.001..0.999f64) {
        let best = maximize_f().unwrap().f_star;
        prop_assert!(bound::f(XYPoint::new(x, y).unwrap()) <= best * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(seeded(24))]

    #[test]
    fn design_round_trip(
        regime in regime(),
        beta_s in 6.0..14.0f64,
        omega_l in 11.0..20.0f64,
        e_cq in 0.18..0.30f64,
        cqc in 3.0..9.0f64,
    ) {
        let spec = DesignSpec::from_json(&format!(
            r#"{{"topology": {{"preset": "ggg_symmetric"}}, "regime": "{}", "beta_s": {beta_s},
                "omega_l_GHz": {omega_l}, "e12_sign": "positive",
                "constraints": [{{"kind": "e_cq_target", "value_GHz": {e_cq}}},
                                {{"kind": "fixed_capacitance", "parameter": "cqc", "value_fF": {cqc}}}]}}"#,
            regime.label()
        )).unwrap();
        match run_design(&spec, &DesignOptions::default()) {
            Ok(report) => {
                let case = report.case(Sign::Positive).unwrap();
                let sol = case.solution.as_ref().unwrap();
                let k = PhysConstants::codata();
                let e = extract_energies(&sol.network.to_network().unwrap(), &k).unwrap().qcq().unwrap();
                prop_assert!(rel(e.a, case.targets.a) < 1e-8);
                prop_assert!(rel(e.b, case.targets.b) < 1e-8);
                prop_assert!(rel(e.e_cq(), e_cq) < 1e-8);
                prop_assert!(sol.capacitances.iter().all(|(_, v)| *v > 0.0));
                prop_assert!(rel(sol.g_on_achieved, case.g_on_predicted) < 1e-6);
            }
            Err(err) => prop_assert!(matches!(err.root(), QcqError::Infeasible { .. }), "{err}"),
        }
    }
}

#[test]
fn grid_oracle_confirms_interior_maximum() {
    let n = 2000;
    let (mut best, mut at) = (f64::NEG_INFINITY, (0.0, 0.0));
    for i in 1..n {
        for j in 1..n {
            let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
            let v = f_reference(x, y);
            if v > best {
                best = v;
                at = (x, y);
            }
        }
    }
    let r = maximize_f().unwrap();
    assert!(r.f_star >= best);
    assert!(r.f_star - best < 1e-6);
    assert!((r.x_star - at.0).abs() < 1e-3 && (r.y_star - at.1).abs() < 1e-3);
    assert!(r.gradient_norm < bound::GRADIENT_TOLERANCE);
}

#[test]
fn maximizers_agree() {
    let registry = MaximizerRegistry::with_defaults();
    let a = maximize_with(&registry, "newton").unwrap();
    let b = maximize_with(&registry, "nelder-mead").unwrap();
    assert!((a.x_star - b.x_star).abs() < 1e-6);
    assert!((a.y_star - b.y_star).abs() < 1e-6);
    assert!(rel(a.f_star, b.f_star) < 1e-12);
    assert!(matches!(
        maximize_with(&registry, "simplex"),
        Err(QcqError::UnknownStrategy { .. })
    ));
}

#[test]
fn design_is_deterministic() {
    let spec = DesignSpec::from_json(
        r#"{"topology": {"preset": "ggg_symmetric"}, "regime": "on_below_off", "beta_s": 10,
            "omega_l_GHz": 15, "e12_sign": "both",
            "constraints": [{"kind": "e_cq_target", "value_GHz": 0.23},
                            {"kind": "fixed_capacitance", "parameter": "cqc", "value_fF": 6}]}"#,
    )
    .unwrap();
    let a = run_design(&spec, &DesignOptions::default()).unwrap();
    let b = run_design(&spec, &DesignOptions::default()).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let sa = a.case(Sign::Positive).unwrap().solution.as_ref().unwrap();
    let sb = b.case(Sign::Positive).unwrap().solution.as_ref().unwrap();
    assert_eq!(sa.sweep.to_csv(), sb.sweep.to_csv());
    // The grounded topology cannot realise a negative E12.
    assert!(a.case(Sign::Negative).unwrap().failure.is_some());
}
