//! The `ℓ_∞ → ℓ_1` norm, its Hilbert-space relaxation, and Grothendieck-type ratios.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, max_over_signs, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::ideals::pi_p_lower;
use crate::linalg::{column, p_norm};
use crate::sampling::{gaussian_matrix, stream_rng, Purpose};
use crate::space::Operator;
use crate::witness::WitnessBudget;

/// Sanity margin for Grothendieck ratios. The constant is only known to be universal; 1.8 sits
/// above the best published upper estimate and is not derived here.
pub const GROTHENDIECK_SANITY_BOUND: f64 = 1.8;

/// Default cap on the total number of sign bits `n + m`.
pub const DEFAULT_TOTAL_BITS_CAP: usize = 22;

/// `max_{s,t ∈ {±1}} Σ a_ij s_i t_j`, computed as `max_t Σ_i |Σ_j a_ij t_j|` over the smaller side.
pub fn norm_inf_to_1(a: &DMatrix<f64>) -> Result<f64> {
    norm_inf_to_1_with_cap(a, DEFAULT_TOTAL_BITS_CAP)
}

pub fn norm_inf_to_1_with_cap(a: &DMatrix<f64>, cap: usize) -> Result<f64> {
    let (m, n) = a.shape();
    check_cap(m + n, cap)?;
    let v = if n <= m {
        max_over_signs(a, |y| p_norm(y, Exponent::ONE)).0
    } else {
        max_over_signs(&a.transpose(), |y| p_norm(y, Exponent::ONE)).0
    };
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearBudget {
    pub starts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for BilinearBudget {
    fn default() -> Self {
        BilinearBudget { starts: 32, iters: 3000, tol: 1e-15, seed: 0x5EED_0003 }
    }
}

fn normalize_rows(x: &mut DMatrix<f64>, fallback: &DMatrix<f64>) {
    for i in 0..x.nrows() {
        let n = x.row(i).norm();
        if n > 0.0 {
            x.row_mut(i).unscale_mut(n);
        } else {
            x.row_mut(i).copy_from(&fallback.row(i));
        }
    }
}

/// Alternating exact block maximisation on products of unit spheres: with `Y` fixed the best
/// `x_i` is the normalised `i`-th row of `A Y`, and symmetrically. Never decreases the value.
fn alternate(a: &DMatrix<f64>, mut y: DMatrix<f64>, budget: &BilinearBudget) -> f64 {
    let at = a.transpose();
    let mut x = DMatrix::zeros(a.nrows(), y.ncols());
    let mut seed_x = a * &y;
    normalize_rows(&mut seed_x, &DMatrix::from_fn(a.nrows(), y.ncols(), |_, j| if j == 0 { 1.0 } else { 0.0 }));
    x.copy_from(&seed_x);
    let mut value = (&x.transpose() * a * &y).trace();
    for _ in 0..budget.iters {
        let mut nx = a * &y;
        normalize_rows(&mut nx, &x);
        let mut ny = &at * &nx;
        normalize_rows(&mut ny, &y);
        let nv = (&nx.transpose() * a * &ny).trace();
        if nv <= value * (1.0 + budget.tol) {
            if nv > value {
                value = nv;
            }
            break;
        }
        x = nx;
        y = ny;
        value = nv;
    }
    value
}

/// `sup |Σ a_ij ⟨x_i, y_j⟩|` over unit vectors of a Hilbert space of dimension `n + m`. The
/// first start is the best sign solution (when enumerable), so the result is never below the
/// `ℓ_∞ → ℓ_1` norm.
pub fn bilinear_hilbert_sup(a: &DMatrix<f64>, budget: &BilinearBudget) -> NormEstimate {
    let (m, n) = a.shape();
    if a.iter().all(|&v| v == 0.0) || m == 0 || n == 0 {
        return NormEstimate::lower(0.0, "zero matrix");
    }
    let d = m + n;
    let mut starts = Vec::with_capacity(budget.starts + 1);
    if n <= DEFAULT_ENUM_CAP {
        let (_, t) = max_over_signs(a, |y| p_norm(y, Exponent::ONE));
        starts.push(DMatrix::from_fn(n, d, |j, c| if c == 0 { t[j] } else { 0.0 }));
    }
    for s in 0..budget.starts {
        let mut rng = stream_rng(budget.seed, Purpose::Multistart, s as u64);
        let mut y = gaussian_matrix(&mut rng, n, d);
        let fallback = DMatrix::from_fn(n, d, |_, c| if c == 0 { 1.0 } else { 0.0 });
        normalize_rows(&mut y, &fallback);
        starts.push(y);
    }
    let values: Vec<f64> = starts.into_par_iter().map(|y| alternate(a, y, budget)).collect();
    let best = values.into_iter().fold(0.0, f64::max);
    NormEstimate::lower(best, format!("alternating ascent in dimension {d}, {} starts", budget.starts))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrothendieckReport {
    pub inf_to_1: NormEstimate,
    pub hilbert_sup: NormEstimate,
    /// `hilbert_sup / inf_to_1`, a lower bound on the Grothendieck constant.
    pub ratio: NormEstimate,
    pub sanity_bound: f64,
    pub within_sanity: bool,
}

pub fn grothendieck_ratio(a: &DMatrix<f64>, budget: &BilinearBudget) -> Result<GrothendieckReport> {
    let inf1 = norm_inf_to_1(a)?;
    if inf1 == 0.0 {
        return Err(Error::precondition("grothendieck_ratio", "a nonzero l_inf -> l_1 norm"));
    }
    let hilbert_sup = bilinear_hilbert_sup(a, budget);
    let r = hilbert_sup.value / inf1;
    Ok(GrothendieckReport {
        inf_to_1: NormEstimate::exact(inf1, "sign enumeration"),
        hilbert_sup,
        ratio: NormEstimate::lower(r, "Hilbertian sup over exact l_inf -> l_1 norm"),
        sanity_bound: GROTHENDIECK_SANITY_BOUND,
        within_sanity: (1.0 - 1e-12..=GROTHENDIECK_SANITY_BOUND).contains(&r),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LittleGrothendieckReport {
    pub pi1_lower: NormEstimate,
    pub op_norm: NormEstimate,
    /// `None` for the zero operator.
    pub ratio: Option<NormEstimate>,
    pub sanity_bound: f64,
    pub pass: bool,
}

/// For `u : ℓ_1^n → ℓ_2^m`, compares a 1-summing lower bound against `‖u‖` (the largest column
/// norm) and checks the ratio stays under the sanity bound.
pub fn little_grothendieck_check(u: &Operator, budget: &WitnessBudget) -> Result<LittleGrothendieckReport> {
    if !u.domain().exp.is_one() || !u.codomain().exp.is_two() {
        return Err(Error::precondition("little_grothendieck_check", "an operator l_1 -> l_2"));
    }
    check_cap(u.domain().dim, budget.enum_cap)?;
    let a = u.matrix();
    let norm = (0..a.ncols()).map(|j| p_norm(&column(a, j), Exponent::TWO)).fold(0.0, f64::max);
    let op_norm = NormEstimate::exact(norm, "max column norm (p = 1)");
    let pi1_lower = pi_p_lower(u, 1.0, budget)?;
    let ratio = (norm > 0.0).then(|| NormEstimate::lower(pi1_lower.value / norm, "pi_1 lower bound over exact norm"));
    let pass = ratio.as_ref().is_none_or(|r| r.value <= GROTHENDIECK_SANITY_BOUND);
    Ok(LittleGrothendieckReport { pi1_lower, op_norm, ratio, sanity_bound: GROTHENDIECK_SANITY_BOUND, pass })
}
