//! Charge-basis diagonalization of coupled transmons,
//! H = Σ 4E_C n̂² − E_J cos φ̂ + Σ 4E_ij n̂_i n̂_j, with zero offset charge.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Mode, SpectrumResult};
use crate::error::{QcqError, Result};

/// Largest product-basis dimension diagonalized densely.
pub const DIMENSION_CAP: usize = 30_000;

/// Population at the charge cutoff above which a truncation warning is raised.
pub const EDGE_POPULATION_WARNING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeElement {
    pub e_c: f64,
    pub e_j: f64,
    pub n_cut: usize,
    /// Local eigenstates kept in the product basis; `2n_cut + 1` keeps all.
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeBasisProblem {
    pub elements: Vec<ChargeElement>,
    /// (i, j, E_ij) in GHz.
    pub couplings: Vec<(usize, usize, f64)>,
    pub dimension_cap: usize,
}

impl ChargeBasisProblem {
    pub fn dimension(&self) -> usize {
        self.elements.iter().map(|e| e.levels).product()
    }
}

/// Eigenpairs of one transmon in the charge basis n = −n_cut..n_cut.
pub struct LocalSpectrum {
    /// GHz, ascending.
    pub energies: Vec<f64>,
    /// Columns are eigenvectors in the charge basis.
    pub vectors: DMatrix<f64>,
    pub n_cut: usize,
}

impl LocalSpectrum {
    /// Transition frequencies from the ground state.
    pub fn transitions(&self) -> Vec<f64> {
        self.energies[1..]
            .iter()
            .map(|e| e - self.energies[0])
            .collect()
    }

    /// Largest population on |n| = n_cut among the first `levels` states.
    pub fn edge_population(&self, levels: usize) -> f64 {
        let last = self.vectors.nrows() - 1;
        (0..levels.min(self.vectors.ncols()))
            .map(|k| {
                self.vectors[(0, k)]
                    .powi(2)
                    .max(self.vectors[(last, k)].powi(2))
            })
            .fold(0.0, f64::max)
    }
}

fn check_element(el: &ChargeElement) -> Result<()> {
    if !(el.e_c.is_finite() && el.e_c > 0.0 && el.e_j.is_finite() && el.e_j >= 0.0) {
        return Err(QcqError::InvalidParameter(format!(
            "need E_C > 0 and E_J >= 0 (got {}, {})",
            el.e_c, el.e_j
        )));
    }
    if el.n_cut == 0 || el.levels == 0 || el.levels > 2 * el.n_cut + 1 {
        return Err(QcqError::InvalidParameter(format!(
            "n_cut = {} with {} kept levels is not admissible",
            el.n_cut, el.levels
        )));
    }
    Ok(())
}

/// Diagonalize a single transmon. Phases are fixed so the ground state has
/// a positive n = 0 amplitude and ⟨k−1|n̂|k⟩ ≥ 0.
pub fn transmon_spectrum(e_c: f64, e_j: f64, n_cut: usize) -> Result<LocalSpectrum> {
    check_element(&ChargeElement {
        e_c,
        e_j,
        n_cut,
        levels: 1,
    })?;
    let d = 2 * n_cut + 1;
    let mut h = DMatrix::zeros(d, d);
    for i in 0..d {
        let n = i as f64 - n_cut as f64;
        h[(i, i)] = 4.0 * e_c * n * n;
        if i + 1 < d {
            h[(i, i + 1)] = -0.5 * e_j;
            h[(i + 1, i)] = -0.5 * e_j;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    if vectors[(n_cut, 0)] < 0.0 {
        vectors.column_mut(0).neg_mut();
    }
    let n_op = charge_operator(n_cut);
    for k in 1..d {
        let elem = (vectors.column(k - 1).transpose() * &n_op * vectors.column(k))[(0, 0)];
        if elem < 0.0 {
            vectors.column_mut(k).neg_mut();
        }
    }
    Ok(LocalSpectrum {
        energies,
        vectors,
        n_cut,
    })
}

fn charge_operator(n_cut: usize) -> DMatrix<f64> {
    let d = 2 * n_cut + 1;
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|i| i as f64 - n_cut as f64),
    ))
}

/// Eigenstates of the coupled problem in the product basis of the lowest
/// local eigenstates. Modes are transitions from the ground state; the
/// per-element weight of a mode is its population on the state with that
/// element singly excited and all others in their ground state.
pub fn charge_spectrum(problem: &ChargeBasisProblem) -> Result<SpectrumResult> {
    if problem.elements.is_empty() {
        return Err(QcqError::InvalidParameter("no elements".into()));
    }
    for el in &problem.elements {
        check_element(el)?;
    }
    let k = problem.elements.len();
    for &(i, j, e) in &problem.couplings {
        if i >= k || j >= k || i == j || !e.is_finite() {
            return Err(QcqError::InvalidParameter(format!(
                "coupling ({i}, {j}, {e}) is not admissible"
            )));
        }
    }
    let dim = problem.dimension();
    if dim > problem.dimension_cap {
        return Err(QcqError::DimensionCap {
            dimension: dim,
            cap: problem.dimension_cap,
        });
    }

    let mut warnings = Vec::new();
    let mut local_e = Vec::with_capacity(k);
    let mut local_n = Vec::with_capacity(k);
    for (idx, el) in problem.elements.iter().enumerate() {
        let s = transmon_spectrum(el.e_c, el.e_j, el.n_cut)?;
        let edge = s.edge_population(el.levels);
        if edge > EDGE_POPULATION_WARNING {
            warnings.push(format!(
                "element {idx}: population {edge:.2e} at the charge cutoff n = ±{}",
                el.n_cut
            ));
        }
        let kept = s.vectors.columns(0, el.levels).into_owned();
        local_n.push(kept.transpose() * charge_operator(el.n_cut) * &kept);
        local_e.push(s.energies[..el.levels].to_vec());
    }

    // Mixed-radix index with element 0 most significant.
    let levels: Vec<usize> = problem.elements.iter().map(|e| e.levels).collect();
    let mut stride = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * levels[i + 1];
    }
    let digit = |state: usize, i: usize| (state / stride[i]) % levels[i];

    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = (0..k).map(|i| local_e[i][digit(s, i)]).sum::<f64>();
    }
    for &(i, j, e_ij) in &problem.couplings {
        let (i, j) = (i.min(j), i.max(j));
        for s in 0..dim {
            let (si, sj) = (digit(s, i), digit(s, j));
            let base = s - si * stride[i] - sj * stride[j];
            for a in 0..levels[i] {
                let ni = local_n[i][(si, a)];
                if ni == 0.0 {
                    continue;
                }
                for b in 0..levels[j] {
                    let t = base + a * stride[i] + b * stride[j];
                    h[(s, t)] += 4.0 * e_ij * ni * local_n[j][(sj, b)];
                }
            }
        }
    }

    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let ground = eig.eigenvalues[order[0]];
    let single: Vec<Option<usize>> = (0..k)
        .map(|i| (levels[i] > 1).then_some(stride[i]))
        .collect();
    let modes = order[1..]
        .iter()
        .map(|&m| {
            let v = eig.eigenvectors.column(m);
            let amplitude: Vec<f64> = single.iter().map(|s| s.map_or(0.0, |s| v[s])).collect();
            Mode {
                frequency: eig.eigenvalues[m] - ground,
                weights: amplitude.iter().map(|a| a * a).collect(),
                amplitude,
            }
        })
        .collect();
    Ok(SpectrumResult { modes, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_transmon_matches_asymptotics() {
        let (e_c, e_j) = (0.230, 25.43);
        let s = transmon_spectrum(e_c, e_j, 12).unwrap();
        let t = s.transitions();
        let approx = (8.0 * e_c * e_j).sqrt() - e_c;
        assert!((t[0] - approx).abs() / approx < 0.01);
        let anharm = t[1] - 2.0 * t[0];
        assert!((anharm + e_c).abs() / e_c < 0.10, "{anharm}");
        assert!(s.edge_population(3) < EDGE_POPULATION_WARNING);
    }

    #[test]
    fn pure_charging_spectrum() {
        let s = transmon_spectrum(0.3, 0.0, 5).unwrap();
        // Levels 0, 4E_C (twice), 16E_C (twice), ...
        let e = &s.energies;
        assert!(e[0].abs() < 1e-12);
        assert!((e[1] - 1.2).abs() < 1e-12 && (e[2] - 1.2).abs() < 1e-12);
        assert!((e[3] - 4.8).abs() < 1e-12 && (e[4] - 4.8).abs() < 1e-12);
    }

    #[test]
    fn cutoff_convergence() {
        let (e_c, e_j) = (0.2, 12.0);
        let a = transmon_spectrum(e_c, e_j, 12).unwrap().transitions()[0];
        let b = transmon_spectrum(e_c, e_j, 24).unwrap().transitions()[0];
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn uncoupled_product_spectrum() {
        let el = |e_c: f64, e_j: f64| ChargeElement {
            e_c,
            e_j,
            n_cut: 10,
            levels: 4,
        };
        let p = ChargeBasisProblem {
            elements: vec![el(0.2, 20.0), el(0.25, 30.0)],
            couplings: vec![],
            dimension_cap: DIMENSION_CAP,
        };
        let s = charge_spectrum(&p).unwrap();
        let w0 = transmon_spectrum(0.2, 20.0, 10).unwrap().transitions()[0];
        let w1 = transmon_spectrum(0.25, 30.0, 10).unwrap().transitions()[0];
        let lowest = w0.min(w1);
        assert!((s.modes[0].frequency - lowest).abs() < 1e-10);
        let which = if w0 < w1 { 0 } else { 1 };
        assert!((s.modes[0].weights[which] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_cap_enforced() {
        let el = ChargeElement {
            e_c: 0.2,
            e_j: 20.0,
            n_cut: 16,
            levels: 33,
        };
        let p = ChargeBasisProblem {
            elements: vec![el; 3],
            couplings: vec![],
            dimension_cap: DIMENSION_CAP,
        };
        assert!(matches!(
            charge_spectrum(&p),
            Err(QcqError::DimensionCap {
                dimension: 35937,
                ..
            })
        ));
    }
}
