//! Two-dimensional maximizers, selectable by name.

use crate::error::{QcqError, Result};

/// A smooth objective on an open box. Methods return `None` outside.
pub trait Objective2d {
    fn value(&self, p: [f64; 2]) -> Option<f64>;
    fn gradient(&self, p: [f64; 2]) -> Option<[f64; 2]>;
    fn hessian(&self, p: [f64; 2]) -> Option<[[f64; 2]; 2]>;
    /// Open box (lower, upper).
    fn bounds(&self) -> ([f64; 2], [f64; 2]);
}

pub trait Maximizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn maximize(&self, objective: &dyn Objective2d, start: [f64; 2]) -> Result<[f64; 2]>;
}

#[derive(Debug, Clone, Copy)]
pub struct GridScan {
    pub point: [f64; 2],
    pub value: f64,
}

/// Best cell centre of an n×n grid over the objective's box.
pub fn grid_scan(objective: &dyn Objective2d, n: usize) -> GridScan {
    let (lo, hi) = objective.bounds();
    let mut best = GridScan {
        point: [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])],
        value: f64::NEG_INFINITY,
    };
    for i in 0..n {
        let x = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let y = lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / n as f64;
            if let Some(v) = objective.value([x, y]) {
                if v > best.value {
                    best = GridScan {
                        point: [x, y],
                        value: v,
                    };
                }
            }
        }
    }
    best
}

/// Newton iteration on ∇f = 0 with step halving that keeps iterates inside
/// the box and never lets the objective decrease.
#[derive(Debug, Clone)]
pub struct NewtonAscent {
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for NewtonAscent {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tolerance: 1e-14,
        }
    }
}

impl Maximizer for NewtonAscent {
    fn name(&self) -> &'static str {
        "newton"
    }

    fn maximize(&self, obj: &dyn Objective2d, start: [f64; 2]) -> Result<[f64; 2]> {
        let mut p = start;
        let mut value = obj
            .value(p)
            .ok_or_else(|| QcqError::Domain("start point outside the domain".into()))?;
        for _ in 0..self.max_iter {
            let g = obj.gradient(p).expect("inside");
            if g[0].hypot(g[1]) < self.tolerance {
                return Ok(p);
            }
            let h = obj.hessian(p).expect("inside");
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            // Newton step when the Hessian is negative definite, gradient step otherwise.
            let mut step = if h[0][0] < 0.0 && det > 0.0 {
                [
                    -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                    -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
                ]
            } else {
                [g[0], g[1]]
            };
            let mut accepted = false;
            for _ in 0..60 {
                let trial = [p[0] + step[0], p[1] + step[1]];
                if let Some(v) = obj.value(trial) {
                    if v >= value {
                        p = trial;
                        value = v;
                        accepted = true;
                        break;
                    }
                }
                step = [0.5 * step[0], 0.5 * step[1]];
            }
            if !accepted {
                // No ascent possible at machine precision.
                return Ok(p);
            }
        }
        let g = obj.gradient(p).expect("inside");
        Err(QcqError::NumericalFailure(format!(
            "newton did not converge: |grad| = {:.3e}",
            g[0].hypot(g[1])
        )))
    }
}

/// Derivative-free simplex search.
#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iter: usize,
    pub initial_step: f64,
    pub x_tolerance: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            initial_step: 0.05,
            x_tolerance: 1e-13,
        }
    }
}

impl Maximizer for NelderMead {
    fn name(&self) -> &'static str {
        "nelder-mead"
    }

    fn maximize(&self, obj: &dyn Objective2d, start: [f64; 2]) -> Result<[f64; 2]> {
        // Minimise −f; points outside the domain score +∞.
        let cost = |p: [f64; 2]| obj.value(p).map_or(f64::INFINITY, |v| -v);
        if !cost(start).is_finite() {
            return Err(QcqError::Domain("start point outside the domain".into()));
        }
        let mut simplex = [
            start,
            [start[0] + self.initial_step, start[1]],
            [start[0], start[1] + self.initial_step],
        ];
        let mut costs = simplex.map(cost);
        let lerp =
            |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        for _ in 0..self.max_iter {
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| costs[i].total_cmp(&costs[j]));
            simplex = order.map(|i| simplex[i]);
            costs = order.map(|i| costs[i]);
            let spread = simplex[1..]
                .iter()
                .map(|p| (p[0] - simplex[0][0]).hypot(p[1] - simplex[0][1]))
                .fold(0.0, f64::max);
            if spread < self.x_tolerance {
                return Ok(simplex[0]);
            }
            let centroid = lerp(simplex[0], simplex[1], 0.5);
            let reflected = lerp(centroid, simplex[2], -1.0);
            let cr = cost(reflected);
            if cr < costs[0] {
                let expanded = lerp(centroid, simplex[2], -2.0);
                let ce = cost(expanded);
                if ce < cr {
                    simplex[2] = expanded;
                    costs[2] = ce;
                } else {
                    simplex[2] = reflected;
                    costs[2] = cr;
                }
            } else if cr < costs[1] {
                simplex[2] = reflected;
                costs[2] = cr;
            } else {
                let contracted = if cr < costs[2] {
                    lerp(centroid, reflected, 0.5)
                } else {
                    lerp(centroid, simplex[2], 0.5)
                };
                let cc = cost(contracted);
                if cc < costs[2].min(cr) {
                    simplex[2] = contracted;
                    costs[2] = cc;
                } else {
                    for k in 1..3 {
                        simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                        costs[k] = cost(simplex[k]);
                    }
                }
            }
        }
        Err(QcqError::NumericalFailure(
            "nelder-mead exhausted its iteration budget".into(),
        ))
    }
}

/// Maximizers registered by name.
pub struct MaximizerRegistry {
    entries: Vec<Box<dyn Maximizer>>,
}

impl MaximizerRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(NewtonAscent::default()));
        r.register(Box::new(NelderMead::default()));
        r
    }

    /// Adds a maximizer, replacing any existing entry with the same name.
    pub fn register(&mut self, m: Box<dyn Maximizer>) {
        self.entries.retain(|e| e.name() != m.name());
        self.entries.push(m);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Maximizer> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| QcqError::UnknownStrategy {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// −(x−0.3)² − 2(y−0.7)² on the unit square.
    struct Bowl;

    impl Objective2d for Bowl {
        fn value(&self, p: [f64; 2]) -> Option<f64> {
            (p.iter().all(|&v| v > 0.0 && v < 1.0))
                .then(|| -(p[0] - 0.3).powi(2) - 2.0 * (p[1] - 0.7).powi(2))
        }
        fn gradient(&self, p: [f64; 2]) -> Option<[f64; 2]> {
            Some([-2.0 * (p[0] - 0.3), -4.0 * (p[1] - 0.7)])
        }
        fn hessian(&self, _p: [f64; 2]) -> Option<[[f64; 2]; 2]> {
            Some([[-2.0, 0.0], [0.0, -4.0]])
        }
        fn bounds(&self) -> ([f64; 2], [f64; 2]) {
            ([0.0, 0.0], [1.0, 1.0])
        }
    }

    #[test]
    fn newton_solves_quadratic_in_one_step() {
        let p = NewtonAscent::default().maximize(&Bowl, [0.9, 0.1]).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-14 && (p[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn nelder_mead_converges() {
        let p = NelderMead::default().maximize(&Bowl, [0.8, 0.2]).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-7 && (p[1] - 0.7).abs() < 1e-7);
    }

    #[test]
    fn grid_scan_brackets_peak() {
        let s = grid_scan(&Bowl, 10);
        assert!((s.point[0] - 0.3).abs() <= 0.05 + 1e-12);
        assert!((s.point[1] - 0.7).abs() <= 0.05 + 1e-12);
    }

    #[test]
    fn registry_lookup() {
        let r = MaximizerRegistry::with_defaults();
        assert_eq!(r.names(), vec!["newton", "nelder-mead"]);
        assert!(matches!(
            r.get("bfgs"),
            Err(QcqError::UnknownStrategy { .. })
        ));
        assert!(NewtonAscent::default().maximize(&Bowl, [1.5, 0.5]).is_err());
    }
}
