//! `ℓ_p → ℓ_q` operator norms: exact where a closed rule exists, certified lower
//! bounds from multistart ascent otherwise, and cheap certified upper bounds.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, max_over_signs, DEFAULT_ENUM_CAP};
use crate::error::Result;
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::{ball_maximizer, column, norming_functional, p_norm, row, spectral_norm};
use crate::sampling::{gaussian_vec, stream_rng, Purpose};
use crate::space::Operator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub starts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub enum_cap: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { starts: 32, iters: 500, tol: 1e-9, seed: 0x5EED_0001, enum_cap: DEFAULT_ENUM_CAP }
    }
}

/// Which closed-form rule produced an exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactRule {
    Zero,
    MaxColumn,
    MaxRow,
    Spectral,
    SignEnumeration,
}

impl ExactRule {
    fn label(self) -> &'static str {
        match self {
            ExactRule::Zero => "zero operator",
            ExactRule::MaxColumn => "max column norm (p = 1)",
            ExactRule::MaxRow => "max row dual norm (q = inf)",
            ExactRule::Spectral => "largest singular value (2 -> 2)",
            ExactRule::SignEnumeration => "sign enumeration (inf -> 1)",
        }
    }
}

/// The rule that would apply to `(p, q)` for an `n`-column matrix, if any.
pub fn exact_rule(a: &DMatrix<f64>, p: Exponent, q: Exponent) -> Option<ExactRule> {
    if a.iter().all(|&v| v == 0.0) {
        Some(ExactRule::Zero)
    } else if p.is_one() {
        Some(ExactRule::MaxColumn)
    } else if q.is_inf() {
        Some(ExactRule::MaxRow)
    } else if p.is_two() && q.is_two() {
        Some(ExactRule::Spectral)
    } else if p.is_inf() && q.is_one() {
        Some(ExactRule::SignEnumeration)
    } else {
        None
    }
}

fn apply_rule(rule: ExactRule, a: &DMatrix<f64>, p: Exponent, q: Exponent, cap: usize) -> Result<f64> {
    Ok(match rule {
        ExactRule::Zero => 0.0,
        ExactRule::MaxColumn => (0..a.ncols()).map(|j| p_norm(&column(a, j), q)).fold(0.0, f64::max),
        ExactRule::MaxRow => (0..a.nrows()).map(|i| p_norm(&row(a, i), p.dual())).fold(0.0, f64::max),
        ExactRule::Spectral => spectral_norm(a),
        ExactRule::SignEnumeration => {
            check_cap(a.ncols(), cap)?;
            max_over_signs(a, |y| p_norm(y, Exponent::ONE)).0
        }
    })
}

pub fn op_norm(u: &Operator) -> Result<NormEstimate> {
    op_norm_with(u, &AscentConfig::default())
}

pub fn op_norm_with(u: &Operator, cfg: &AscentConfig) -> Result<NormEstimate> {
    op_norm_matrix(u.matrix(), u.domain().exp, u.codomain().exp, cfg)
}

/// Norm of `a : ℓ_p^n → ℓ_q^m`.
pub fn op_norm_matrix(a: &DMatrix<f64>, p: Exponent, q: Exponent, cfg: &AscentConfig) -> Result<NormEstimate> {
    if let Some(rule) = exact_rule(a, p, q) {
        let v = apply_rule(rule, a, p, q, cfg.enum_cap)?;
        return Ok(NormEstimate::exact(v, rule.label()));
    }
    let starts = default_starts(a.ncols(), p, cfg);
    let (v, _) = multistart(a, p, q, &starts, cfg.iters, cfg.tol);
    Ok(NormEstimate::lower(v, format!("multistart ascent, {} starts", starts.len())))
}

/// A value that is never below the true norm: exact when a rule applies, else the minimum of
/// row/column Hölder bounds, the interpolated spectral bound, and vertex enumeration when the
/// domain is `ℓ_∞` or the codomain is `ℓ_1` within the cap.
pub fn op_norm_upper(a: &DMatrix<f64>, p: Exponent, q: Exponent, cap: usize) -> NormEstimate {
    if let Some(rule) = exact_rule(a, p, q) {
        if let Ok(v) = apply_rule(rule, a, p, q, cap) {
            return NormEstimate::exact(v, rule.label());
        }
    }
    let (m, n) = a.shape();
    // Enumerated vertex values are attained, so no other bound can beat them.
    if p.is_inf() && n <= cap {
        let v = max_over_signs(a, |y| p_norm(y, q)).0;
        return NormEstimate::upper(v, "vertex enumeration of the l_inf ball (attained)");
    }
    if q.is_one() && m <= cap {
        let v = max_over_signs(&a.transpose(), |y| p_norm(y, p.dual())).0;
        return NormEstimate::upper(v, "vertex enumeration of the l_inf dual ball (attained)");
    }
    let rows: Vec<f64> = (0..m).map(|i| p_norm(&row(a, i), p.dual())).collect();
    let cols: Vec<f64> = (0..n).map(|j| p_norm(&column(a, j), q)).collect();
    let mut best = p_norm(&rows, q).min(p_norm(&cols, p.dual()));
    let mut how = "Hölder row/column bound";

    let grow_in = (n as f64).powf((0.5 - p.reciprocal()).max(0.0));
    let grow_out = (m as f64).powf((q.reciprocal() - 0.5).max(0.0));
    let spectral = grow_in * spectral_norm(a) * grow_out;
    if spectral < best {
        best = spectral;
        how = "interpolated spectral bound";
    }
    NormEstimate::upper(best, how)
}

/// Basis vectors, the normalised all-ones vector, then seeded Gaussian directions.
pub(crate) fn default_starts(n: usize, p: Exponent, cfg: &AscentConfig) -> Vec<Vec<f64>> {
    let mut starts = Vec::with_capacity(cfg.starts.max(n + 1));
    for k in 0..n.min(cfg.starts) {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        starts.push(e);
    }
    if starts.len() < cfg.starts {
        starts.push(normalized(vec![1.0; n], p));
    }
    let mut rng = stream_rng(cfg.seed, Purpose::Multistart, n as u64);
    while starts.len() < cfg.starts {
        starts.push(normalized(gaussian_vec(&mut rng, n), p));
    }
    starts
}

fn normalized(mut x: Vec<f64>, p: Exponent) -> Vec<f64> {
    let s = p_norm(&x, p);
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

fn ratio(a: &DMatrix<f64>, x: &[f64], p: Exponent, q: Exponent) -> f64 {
    let nx = p_norm(x, p);
    if nx == 0.0 {
        return 0.0;
    }
    let y = a * nalgebra::DVector::from_column_slice(x);
    p_norm(y.as_slice(), q) / nx
}

/// Monotone ascent of `‖a x‖_q` over the unit ball of `ℓ_p`: each step jumps to the ball point
/// maximising the linearisation `⟨aᵀ J_q(a x), ·⟩`. Because the objective is convex this never
/// decreases it; fixed points are local maxima.
pub(crate) fn ascend(
    a: &DMatrix<f64>,
    p: Exponent,
    q: Exponent,
    start: &[f64],
    iters: usize,
    tol: f64,
) -> (f64, Vec<f64>) {
    let mut x = normalized(start.to_vec(), p);
    let mut f = ratio(a, &x, p, q);
    let at = a.transpose();
    for _ in 0..iters {
        let y = a * nalgebra::DVector::from_column_slice(&x);
        if y.iter().all(|&v| v == 0.0) {
            break;
        }
        let g = &at * nalgebra::DVector::from_vec(norming_functional(y.as_slice(), q));
        let cand = ball_maximizer(g.as_slice(), p);
        let fc = ratio(a, &cand, p, q);
        if fc > f {
            let gain = (fc - f) / f.max(f64::MIN_POSITIVE);
            x = cand;
            f = fc;
            if gain < tol {
                break;
            }
        } else {
            break;
        }
    }
    (f, x)
}

/// Runs [`ascend`] from each start (in parallel) and returns the first best result.
pub(crate) fn multistart(
    a: &DMatrix<f64>,
    p: Exponent,
    q: Exponent,
    starts: &[Vec<f64>],
    iters: usize,
    tol: f64,
) -> (f64, Vec<f64>) {
    let results: Vec<(f64, Vec<f64>)> = starts.par_iter().map(|s| ascend(a, p, q, s, iters, tol)).collect();
    let mut best = (0.0, starts.first().cloned().unwrap_or_default());
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    best
}
