use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::DEFAULT_ENUM_CAP;
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::ideals::{gamma_summing_lower, pi_2_upper_default, pi_p_lower};
use crate::linalg::{frobenius, svd_matrix};
use crate::opnorm::op_norm_upper;
use crate::sampling::{gaussian, gaussian_matrix, stream_rng, Purpose};
use crate::space::Operator;
use crate::witness::WitnessBudget;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhsBudget {
    /// Random contraction pairs per truncation.
    pub draws: usize,
    /// Hill-climbing proposals per pair.
    pub steps: usize,
    pub seed: u64,
    pub enum_cap: usize,
}

impl Default for PhsBudget {
    fn default() -> Self {
        PhsBudget { draws: 64, steps: 200, seed: 0x5EED_0004, enum_cap: DEFAULT_ENUM_CAP }
    }
}

/// Scales `v : ℓ_2^k → E` and `w : F → ℓ_2^m` to norm at most one using exact-or-upper
/// operator norms, then returns `‖w u v‖_HS`.
struct Objective<'a> {
    a: &'a DMatrix<f64>,
    p: Exponent,
    q: Exponent,
    cap: usize,
}

impl Objective<'_> {
    fn contract(&self, x: &DMatrix<f64>, from: Exponent, to: Exponent) -> Option<DMatrix<f64>> {
        let n = op_norm_upper(x, from, to, self.cap).value;
        (n > 0.0 && n.is_finite()).then(|| x / n)
    }

    fn value(&self, v: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
        match (self.contract(v, Exponent::TWO, self.p), self.contract(w, self.q, Exponent::TWO)) {
            (Some(v), Some(w)) => frobenius(&(w * self.a * v)),
            _ => f64::NEG_INFINITY,
        }
    }
}

fn climb(obj: &Objective, mut v: DMatrix<f64>, mut w: DMatrix<f64>, steps: usize, stream: u64, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, Purpose::Contraction, stream);
    let mut f = obj.value(&v, &w);
    let mut step: f64 = 0.3;
    for _ in 0..steps {
        let dv = gaussian_matrix(&mut rng, v.nrows(), v.ncols());
        let dw = gaussian_matrix(&mut rng, w.nrows(), w.ncols());
        let (sv, sw) = (step * frobenius(&v) / frobenius(&dv), step * frobenius(&w) / frobenius(&dw));
        let cv = &v + dv * sv;
        let cw = &w + dw * sw;
        let fc = obj.value(&cv, &cw);
        if fc > f {
            v = &cv / frobenius(&cv);
            w = &cw / frobenius(&cw);
            f = fc;
            step = (step * 1.5).min(1.0);
        } else {
            step = (step * 0.8).max(1e-8);
        }
    }
    f
}

/// Searches at exactly `(k, m)`: identity and singular-vector embeddings, then `draws`
/// Gaussian pairs, each refined independently on its own stream.
fn search_at(obj: &Objective, k: usize, m: usize, budget: &PhsBudget) -> f64 {
    let (rows, cols) = obj.a.shape();
    let svd = svd_matrix(obj.a);
    let embed = |src: &DMatrix<f64>, r: usize, c: usize| {
        DMatrix::from_fn(r, c, |i, j| if i < src.nrows() && j < src.ncols() { src[(i, j)] } else { 0.0 })
    };
    let mut starts = vec![
        (DMatrix::identity(cols, k), DMatrix::identity(m, rows)),
        (embed(&svd.v_t.transpose(), cols, k), embed(&svd.u.transpose(), m, rows)),
    ];
    let fixed = starts.len() as u64;
    let tag = ((k as u64) << 40) ^ ((m as u64) << 20);
    starts.extend((0..budget.draws).map(|d| {
        let mut rng = stream_rng(budget.seed, Purpose::Contraction, tag ^ (d as u64 + fixed) ^ (1 << 62));
        let v = gaussian_matrix(&mut rng, cols, k);
        let mut w = gaussian_matrix(&mut rng, m, rows);
        if frobenius(&w) == 0.0 {
            w[(0, 0)] = gaussian(&mut rng).abs() + 1.0;
        }
        (v, w)
    }));
    starts
        .into_par_iter()
        .enumerate()
        .map(|(i, (v, w))| climb(obj, v, w, budget.steps, tag ^ i as u64, budget.seed))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// Lower bound on `sup ‖w u v‖_HS` over contractions `v : ℓ_2^k → E`, `w : F → ℓ_2^m`.
///
/// Every truncation `(k', m') ≤ (k, m)` is searched and the running maximum taken, since a
/// smaller pair embeds by zero padding. This makes the result monotone in `k`, `m`, and the
/// budget.
pub fn phs_lower(u: &Operator, k: usize, m: usize, budget: &PhsBudget) -> Result<NormEstimate> {
    if k == 0 || m == 0 || u.is_zero() {
        return Ok(NormEstimate::lower(0.0, "zero operator or empty truncation"));
    }
    let obj = Objective { a: u.matrix(), p: u.domain().exp, q: u.codomain().exp, cap: budget.enum_cap };
    let mut table = vec![vec![0.0f64; m + 1]; k + 1];
    for i in 1..=k {
        for j in 1..=m {
            let here = search_at(&obj, i, j, budget);
            table[i][j] = here.max(table[i - 1][j]).max(table[i][j - 1]);
        }
    }
    Ok(NormEstimate::lower(
        table[k][m],
        format!("{} draws x {} steps per truncation up to ({k}, {m})", budget.draws, budget.steps),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhsPi2Report {
    pub phs_lower: NormEstimate,
    pub pi2_lower: NormEstimate,
    pub pi2_upper: NormEstimate,
    /// `phs_lower / pi2_upper`, `None` when the upper bound vanishes.
    pub pinch: Option<NormEstimate>,
    /// `phs_lower ≤ pi2_upper + 1e-8`.
    pub holds: bool,
}

/// Compares the sampled PHS bound with both sides of the 2-summing norm, truncating at the
/// full dimensions.
pub fn phs_vs_pi2_report(u: &Operator, budget: &PhsBudget, witness: &WitnessBudget) -> Result<PhsPi2Report> {
    if !u.codomain().exp.is_two() {
        return Err(Error::precondition("phs_vs_pi2_report", "an l_2 codomain"));
    }
    let phs = phs_lower(u, u.domain().dim, u.codomain().dim, budget)?;
    let pi2_lower = pi_p_lower(u, 2.0, witness)?;
    let (pi2_upper, _) = pi_2_upper_default(u)?;
    let pinch = (pi2_upper.value > 0.0).then(|| NormEstimate::lower(phs.value / pi2_upper.value, "phs lower over pi_2 upper"));
    let holds = phs.value <= pi2_upper.value + 1e-8;
    Ok(PhsPi2Report { phs_lower: phs, pi2_lower, pi2_upper, pinch, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhsGammaRow {
    pub size: usize,
    pub phs_lower: NormEstimate,
    pub gamma_lower: NormEstimate,
    /// `phs_lower / gamma_lower`. Both sides are lower bounds, so this bounds nothing.
    pub ratio_of_lower_bounds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhsGammaReport {
    pub rows: Vec<PhsGammaRow>,
}

/// `phs_lower(u, t, t)` against a γ-summing lower bound over families of size `t`, for
/// `t = 1, …, dim E`. Both sides are lower bounds, so nothing is asserted.
pub fn phs_vs_gamma_report(
    u: &Operator,
    budget: &PhsBudget,
    witness: &WitnessBudget,
    plan: &crate::sampling::RandomPlan,
) -> Result<PhsGammaReport> {
    if u.codomain().exp.value() < 2.0 {
        return Err(Error::precondition("phs_vs_gamma_report", "codomain exponent >= 2"));
    }
    let rows = (1..=u.domain().dim)
        .map(|t| {
            let phs = phs_lower(u, t, t, budget)?;
            let gamma = gamma_summing_lower(u, &WitnessBudget { family_size: Some(t), ..*witness }, plan)?;
            let ratio = (gamma.value > 0.0).then(|| phs.value / gamma.value);
            Ok(PhsGammaRow { size: t, phs_lower: phs, gamma_lower: gamma, ratio_of_lower_bounds: ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhsGammaReport { rows })
}
