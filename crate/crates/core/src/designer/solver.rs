//! Damped Newton solve of the capacitance equations in log-capacitance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::parameters::{ParameterKind, ParameterizedNetwork};
use crate::capnet::extract_energies;
use crate::constants::PhysConstants;
use crate::error::{QcqError, Result};

/// Default E_Cq used for the starting point when none is constrained.
const FALLBACK_E_CQ: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Converged once every relative residual is below this.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Spread of the log-normal restart perturbation.
    pub perturbation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tolerance: 1e-12,
            restarts: 20,
            seed: 0,
            perturbation: 1.0,
        }
    }
}

/// Targets for A, B and any number of qubit charging energies; capacitances
/// held fixed are given as (parameter index, value).
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSystem {
    pub a: f64,
    pub b: f64,
    pub e_cq: Vec<f64>,
    pub fixed: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    /// All parameter values, fF.
    pub values: Vec<f64>,
    /// Relative residuals: A, B, then each E_Cq target.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
}

impl SolveOutcome {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

struct Problem<'a> {
    network: &'a ParameterizedNetwork,
    constants: &'a PhysConstants,
    system: &'a EquationSystem,
    unknown: Vec<usize>,
}

impl Problem<'_> {
    fn values(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut v = vec![0.0; self.network.parameters().len()];
        for &(i, x) in &self.system.fixed {
            v[i] = x;
        }
        for (k, &i) in self.unknown.iter().enumerate() {
            v[i] = u[k].exp();
        }
        v
    }

    fn residual(&self, u: &DVector<f64>) -> Option<DVector<f64>> {
        let values = self.values(u);
        if values.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let e = extract_energies(&self.network.build(&values).ok()?, self.constants)
            .ok()?
            .qcq()
            .ok()?;
        let mut r = Vec::with_capacity(2 + self.system.e_cq.len());
        r.push(e.a / self.system.a - 1.0);
        r.push(e.b / self.system.b - 1.0);
        for &t in &self.system.e_cq {
            r.push(e.e_cq() / t - 1.0);
        }
        r.iter()
            .all(|x| x.is_finite())
            .then(|| DVector::from_vec(r))
    }

    fn jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        let n = u.len();
        let h = 1e-6;
        let mut j = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += h;
            dn[k] -= h;
            let col = (self.residual(&up)? - self.residual(&dn)?) / (2.0 * h);
            j.set_column(k, &col);
        }
        Some(j)
    }

    fn initial_guess(&self) -> DVector<f64> {
        let e2h = self.constants.e2_over_h();
        let e_cq = self.system.e_cq.first().copied().unwrap_or(FALLBACK_E_CQ);
        let fixed_on_qubit: f64 = self
            .system
            .fixed
            .iter()
            .filter(|&&(i, _)| {
                self.network.kind(i) == ParameterKind::Mutual && self.network.touches_qubit(i)
            })
            .map(|&(_, v)| v)
            .sum();
        let c0q = (e2h / (2.0 * e_cq) - fixed_on_qubit).max(1.0);
        DVector::from_iterator(
            self.unknown.len(),
            self.unknown.iter().map(|&i| {
                match self.network.kind(i) {
                    ParameterKind::QubitSelf => c0q,
                    ParameterKind::CouplerSelf => 0.7 * c0q,
                    ParameterKind::Mutual => 0.1,
                }
                .ln()
            }),
        )
    }

    /// One Newton run from `u`; returns the final point, residual and iteration count.
    fn newton(
        &self,
        mut u: DVector<f64>,
        opts: &SolverOptions,
    ) -> (DVector<f64>, Option<DVector<f64>>, usize) {
        let Some(mut r) = self.residual(&u) else {
            return (u, None, 0);
        };
        for it in 0..opts.max_iter {
            if r.amax() < opts.tolerance {
                return (u, Some(r), it);
            }
            let Some(j) = self.jacobian(&u) else {
                return (u, Some(r), it);
            };
            let step = match j.clone().lu().solve(&(-&r)) {
                Some(s) if s.iter().all(|x| x.is_finite()) => s,
                _ => match j.svd(true, true).solve(&(-&r), 1e-14) {
                    Ok(s) => s,
                    Err(_) => return (u, Some(r), it),
                },
            };
            // Keep single steps within a factor e² per capacitance.
            let scale = (2.0 / step.amax()).min(1.0);
            let step = step * scale;
            let norm = r.norm();
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial = &u + &step * t;
                if let Some(rt) = self.residual(&trial) {
                    if rt.norm() < (1.0 - 1e-4 * t) * norm {
                        u = trial;
                        r = rt;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !moved {
                return (u, Some(r), it);
            }
        }
        (u, Some(r), opts.max_iter)
    }
}

/// Solve for the free parameters. The number of free parameters must equal
/// the number of equations (2 + number of E_Cq targets).
pub fn solve_system(
    network: &ParameterizedNetwork,
    system: &EquationSystem,
    constants: &PhysConstants,
    opts: &SolverOptions,
) -> Result<SolveOutcome> {
    if !(system.a.is_finite() && system.b.is_finite() && system.b != 0.0 && system.a > 0.0) {
        return Err(QcqError::InvalidParameter(format!(
            "targets A = {}, B = {} are not admissible",
            system.a, system.b
        )));
    }
    for &t in &system.e_cq {
        if !(t.is_finite() && t > 0.0) {
            return Err(QcqError::InvalidParameter(format!(
                "E_Cq target must be positive, got {t}"
            )));
        }
    }
    for &(i, v) in &system.fixed {
        if i >= network.parameters().len() || !(v.is_finite() && v >= 0.0) {
            return Err(QcqError::InvalidParameter(format!(
                "fixed capacitance #{i} = {v} is not admissible"
            )));
        }
    }
    let unknown: Vec<usize> = (0..network.parameters().len())
        .filter(|i| !system.fixed.iter().any(|&(f, _)| f == *i))
        .collect();
    let equations = 2 + system.e_cq.len();
    if unknown.len() != equations {
        return Err(QcqError::InvalidParameter(format!(
            "{} free capacitances but {equations} equations; constraints + 2 must equal the unknown count",
            unknown.len()
        )));
    }
    let problem = Problem {
        network,
        constants,
        system,
        unknown,
    };
    let base = problem.initial_guess();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, DVector<f64>, DVector<f64>, usize)> = None;
    for attempt in 0..=opts.restarts {
        let start = if attempt == 0 {
            base.clone()
        } else {
            base.map(|x| x + opts.perturbation * rng.gen_range(-1.0..1.0))
        };
        let (u, r, iterations) = problem.newton(start, opts);
        let Some(r) = r else { continue };
        let worst = r.amax();
        if worst < opts.tolerance.max(1e-10) {
            return Ok(SolveOutcome {
                values: problem.values(&u),
                residuals: r.iter().copied().collect(),
                iterations,
                restarts: attempt,
            });
        }
        if best.as_ref().map_or(true, |b| worst < b.0) {
            best = Some((worst, u, r, iterations));
        }
    }
    let best_residual = best.map_or(f64::INFINITY, |b| b.0);
    Err(QcqError::Infeasible {
        reason: format!(
            "no positive capacitance set reaches A = {}, B = {} after {} restarts",
            system.a, system.b, opts.restarts
        ),
        best_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capnet::{closed_form_ggg, GggCaps};

    fn ggg_system(a: f64, b: f64) -> EquationSystem {
        EquationSystem {
            a,
            b,
            e_cq: vec![0.230],
            fixed: vec![(2, 6.0)],
        }
    }

    #[test]
    fn ggg_solution_satisfies_closed_form() {
        let net = ParameterizedNetwork::ggg_symmetric();
        let c = PhysConstants::codata();
        for (a, b) in [(1.24, 640.0), (1.84, 640.0)] {
            let out = solve_system(&net, &ggg_system(a, b), &c, &SolverOptions::default()).unwrap();
            let v = &out.values;
            let cf = closed_form_ggg(
                GggCaps {
                    c0q: v[0],
                    c0c: v[1],
                    cqc: v[2],
                    cqq: v[3],
                },
                &c,
            )
            .unwrap();
            assert!((cf.a / a - 1.0).abs() < 1e-9);
            assert!((cf.b / b - 1.0).abs() < 1e-9);
            assert!((cf.e_cq / 0.230 - 1.0).abs() < 1e-9);
            assert_eq!(v[2], 6.0);
        }
    }

    #[test]
    fn wrong_sign_is_infeasible() {
        let net = ParameterizedNetwork::ggg_symmetric();
        let opts = SolverOptions {
            restarts: 3,
            ..SolverOptions::default()
        };
        let err = solve_system(
            &net,
            &ggg_system(1.24, -640.0),
            &PhysConstants::codata(),
            &opts,
        )
        .unwrap_err();
        match err {
            QcqError::Infeasible { best_residual, .. } => assert!(best_residual > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_square_system_rejected() {
        let net = ParameterizedNetwork::ggg_symmetric();
        let sys = EquationSystem {
            a: 1.24,
            b: 640.0,
            e_cq: vec![],
            fixed: vec![(2, 6.0)],
        };
        assert!(matches!(
            solve_system(
                &net,
                &sys,
                &PhysConstants::codata(),
                &SolverOptions::default()
            ),
            Err(QcqError::InvalidParameter(_))
        ));
    }

    #[test]
    fn deterministic() {
        let net = ParameterizedNetwork::ggg_symmetric();
        let c = PhysConstants::codata();
        let opts = SolverOptions::default();
        let a = solve_system(&net, &ggg_system(1.84, 640.0), &c, &opts).unwrap();
        let b = solve_system(&net, &ggg_system(1.84, 640.0), &c, &opts).unwrap();
        assert_eq!(a, b);
    }
}
