//! Seeded hill-climbing over finite families, used to lower-bound suprema of the form
//! `sup_X  numerator(X) / denominator(X)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::DEFAULT_ENUM_CAP;
use crate::linalg::frobenius;
use crate::sampling::{gaussian_matrix, stream_rng, Purpose};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBudget {
    /// Total climbs, deterministic candidates included.
    pub restarts: usize,
    /// Proposals per climb.
    pub iters: usize,
    /// Family size; `None` means the domain dimension.
    pub family_size: Option<usize>,
    pub seed: u64,
    pub enum_cap: usize,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        WitnessBudget { restarts: 16, iters: 200, family_size: None, seed: 0x5EED_0002, enum_cap: DEFAULT_ENUM_CAP }
    }
}

impl WitnessBudget {
    pub fn with_seed(self, seed: u64) -> Self {
        WitnessBudget { seed, ..self }
    }

    pub fn size_for(&self, dim: usize) -> usize {
        self.family_size.unwrap_or(dim).max(1)
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub value: f64,
    /// Columns are the family members.
    pub family: DMatrix<f64>,
}

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn climb<F>(start: DMatrix<f64>, index: usize, budget: &WitnessBudget, objective: &F) -> Witness
where
    F: Fn(&DMatrix<f64>) -> f64,
{
    let mut rng = stream_rng(budget.seed, Purpose::Witness, index as u64);
    let (rows, cols) = start.shape();
    let mut x = start;
    let mut f = score(objective(&x));
    let mut step: f64 = 0.3;
    for _ in 0..budget.iters {
        let g = gaussian_matrix(&mut rng, rows, cols);
        let gn = frobenius(&g);
        let xn = frobenius(&x);
        if gn == 0.0 || xn == 0.0 {
            break;
        }
        let cand = &x + g * (step * xn / gn);
        let fc = score(objective(&cand));
        if fc > f {
            let cn = frobenius(&cand);
            x = cand / cn;
            f = fc;
            step = (step * 1.5).min(1.0);
        } else {
            step = (step * 0.8).max(1e-8);
        }
    }
    Witness { value: f, family: x }
}

/// Climbs from each candidate, then from seeded Gaussian families until `budget.restarts`
/// climbs have run. Climbs are independent, so the result is the same for any thread count;
/// ties keep the earliest climb.
pub fn search<F>(rows: usize, cols: usize, candidates: Vec<DMatrix<f64>>, budget: &WitnessBudget, objective: F) -> Witness
where
    F: Fn(&DMatrix<f64>) -> f64 + Sync,
{
    let total = budget.restarts.max(candidates.len()).max(1);
    let mut starts = candidates;
    let mut rng = stream_rng(budget.seed, Purpose::Witness, u64::MAX);
    while starts.len() < total {
        starts.push(gaussian_matrix(&mut rng, rows, cols));
    }
    let results: Vec<Witness> =
        starts.into_par_iter().enumerate().map(|(i, s)| climb(s, i, budget, &objective)).collect();
    let mut best: Option<Witness> = None;
    for w in results {
        if best.as_ref().is_none_or(|b| w.value > b.value) {
            best = Some(w);
        }
    }
    let mut best = best.expect("at least one climb");
    if !best.value.is_finite() {
        best.value = 0.0;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_maximum_of_smooth_ratio() {
        // sup over x of (x₁² + 4x₂²)/‖x‖² = 4
        let w = search(2, 1, vec![], &WitnessBudget::default(), |x| {
            let n = x.norm_squared();
            (x[(0, 0)].powi(2) + 4.0 * x[(1, 0)].powi(2)) / n
        });
        assert!(w.value > 4.0 - 1e-6 && w.value <= 4.0 + 1e-12, "{}", w.value);
    }

    #[test]
    fn candidates_are_kept_when_optimal() {
        let cand = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let budget = WitnessBudget { restarts: 1, iters: 0, ..WitnessBudget::default() };
        let w = search(2, 1, vec![cand], &budget, |x| x[(1, 0)].abs() / x.norm());
        assert_eq!(w.value, 1.0);
    }

    #[test]
    fn deterministic_across_runs() {
        let obj = |x: &DMatrix<f64>| (x[(0, 0)] + 2.0 * x[(1, 1)]).abs() / x.norm();
        let a = search(2, 2, vec![], &WitnessBudget::default(), obj);
        let b = search(2, 2, vec![], &WitnessBudget::default(), obj);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
