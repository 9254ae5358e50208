use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::ideals::{gamma_norm_hilbert_domain, gamma_summing_lower};
use crate::sampling::RandomPlan;
use crate::space::Operator;
use crate::witness::WitnessBudget;

pub const MAX_GROWTH_DIM: usize = 128;

/// How the diagonal entries `σ_1, σ_2, …` are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// Finitely supported: the listed entries followed by zeros.
    Explicit(Vec<f64>),
    /// `σ_n = scale · n^{-alpha}`.
    PowerLaw { scale: f64, alpha: f64 },
}

impl SigmaRule {
    /// `σ_n`, one-based.
    pub fn entry(&self, n: usize) -> f64 {
        match self {
            SigmaRule::Explicit(v) => v.get(n.wrapping_sub(1)).copied().unwrap_or(0.0),
            SigmaRule::PowerLaw { scale, alpha } => scale * (n as f64).powf(-alpha),
        }
    }

    pub fn truncate(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.entry(k)).collect()
    }

    fn is_zero(&self) -> bool {
        match self {
            SigmaRule::Explicit(v) => v.iter().all(|&s| s == 0.0),
            SigmaRule::PowerLaw { scale, .. } => *scale == 0.0,
        }
    }

    /// Whether `σ ∈ ℓ_r`.
    pub fn in_lr(&self, r: Exponent) -> bool {
        if self.is_zero() {
            return true;
        }
        match self {
            SigmaRule::Explicit(_) => true,
            SigmaRule::PowerLaw { alpha, .. } if r.is_inf() => *alpha >= 0.0,
            SigmaRule::PowerLaw { alpha, .. } => alpha * r.value() > 1.0,
        }
    }
}

/// The diagonal operator `e_n ↦ σ_n e_n` from `ℓ_p` to `ℓ_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub sigma: SigmaRule,
}

impl DiagonalSpec {
    pub fn power_law(p: Exponent, q: Exponent, alpha: f64) -> Self {
        DiagonalSpec { p, q, sigma: SigmaRule::PowerLaw { scale: 1.0, alpha } }
    }

    pub fn truncation(&self, n: usize) -> Result<Operator> {
        Operator::diagonal(&self.sigma.truncate(n), self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictedClass {
    GammaRadonifying,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableRow {
    /// `1 ≤ p < 2`, `q < 2p/(2−p)`: `σ ∈ ℓ_r` with `1/r = 1/2 − 1/p + 1/q`.
    First,
    /// `1 ≤ p < 2`, `q ≥ 2p/(2−p)`: `σ ∈ ℓ_∞`.
    Second,
    /// `2 ≤ p < ∞`: `σ ∈ ℓ_q`.
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub n: usize,
    /// `Σ_{k ≤ n} |σ_k|^r`, or `max_{k ≤ n} |σ_k|` when `r = ∞`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub predicted: PredictedClass,
    pub row: TableRow,
    pub r: Exponent,
    pub criterion: String,
    /// Dyadic partial sums of the membership series.
    pub evidence: Vec<PartialSum>,
}

fn partial_sums(sigma: &SigmaRule, r: Exponent) -> Vec<PartialSum> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut k = 0;
    for e in 0..=16 {
        let n = 1usize << e;
        while k < n {
            k += 1;
            let s = sigma.entry(k).abs();
            acc = if r.is_inf() { f64::max(acc, s) } else { acc + s.powf(r.value()) };
        }
        out.push(PartialSum { n, value: acc });
    }
    out
}

/// Reads the γ-radonifying classification of a diagonal operator off the table.
pub fn diag_classify(spec: &DiagonalSpec) -> Result<ClassificationVerdict> {
    let (p, q) = (spec.p, spec.q);
    if p.is_inf() || q.is_inf() {
        return Err(Error::precondition("diag_classify", "finite p and q"));
    }
    let (pv, qv) = (p.value(), q.value());
    let (row, r) = if pv < 2.0 {
        let threshold = 2.0 * pv / (2.0 - pv);
        if qv < threshold {
            let inv = 0.5 - 1.0 / pv + 1.0 / qv;
            (TableRow::First, Exponent::new(1.0 / inv)?)
        } else {
            (TableRow::Second, Exponent::INF)
        }
    } else {
        (TableRow::Third, q)
    };
    let member = spec.sigma.in_lr(r);
    let criterion = match row {
        TableRow::First => format!("1 <= p < 2 and q < 2p/(2-p): sigma in l_r with 1/r = 1/2 - 1/p + 1/q, r = {r}"),
        TableRow::Second => "1 <= p < 2 and q >= 2p/(2-p): sigma in l_inf".to_string(),
        TableRow::Third => format!("2 <= p < inf: sigma in l_q, r = {r}"),
    };
    Ok(ClassificationVerdict {
        predicted: if member { PredictedClass::GammaRadonifying } else { PredictedClass::Not },
        row,
        r,
        criterion,
        evidence: partial_sums(&spec.sigma, r),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthThresholds {
    /// Slopes at or below this corroborate convergence.
    pub converge_max: f64,
    /// Slopes at or above this corroborate divergence.
    pub diverge_min: f64,
}

impl Default for GrowthThresholds {
    fn default() -> Self {
        GrowthThresholds { converge_max: 0.02, diverge_min: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthTrend {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub dim: usize,
    pub estimate: NormEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln(value)` against `ln(dim)` over the positive values.
    pub slope: f64,
    pub thresholds: GrowthThresholds,
    pub trend: GrowthTrend,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dim,value,kind,stderr\n");
        for row in &self.rows {
            let e = &row.estimate;
            let stderr = e.stderr;
            let _ = writeln!(s, "{},{},{},{}", row.dim, e.value, e.kind, stderr);
        }
        s
    }
}

fn log_log_slope(rows: &[GrowthRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.estimate.value > 0.0)
        .map(|r| ((r.dim as f64).ln(), r.estimate.value.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// γ-norm estimates of the truncations `u_σ : ℓ_p^n → ℓ_q^n` with a log-log slope fit.
pub fn diag_growth_experiment(
    spec: &DiagonalSpec,
    dims: &[usize],
    plan: &RandomPlan,
    budget: &WitnessBudget,
    thresholds: GrowthThresholds,
) -> Result<GrowthTable> {
    plan.validate()?;
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) || dims[0] == 0 {
        return Err(Error::precondition("diag_growth_experiment", "a nonempty increasing list of positive dims"));
    }
    if *dims.last().unwrap() > MAX_GROWTH_DIM {
        return Err(Error::precondition("diag_growth_experiment", format!("dims at most {MAX_GROWTH_DIM}")));
    }
    let rows = dims
        .iter()
        .map(|&n| {
            let u = spec.truncation(n)?;
            let estimate = if spec.p.is_two() {
                gamma_norm_hilbert_domain(&u, plan)?
            } else {
                gamma_summing_lower(&u, budget, plan)?
            };
            Ok(GrowthRow { dim: n, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&rows);
    let trend = if slope <= thresholds.converge_max {
        GrowthTrend::Bounded
    } else if slope >= thresholds.diverge_min {
        GrowthTrend::Growing
    } else {
        GrowthTrend::Inconclusive
    };
    Ok(GrowthTable { rows, slope, thresholds, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn table_examples() {
        let v = diag_classify(&DiagonalSpec::power_law(e(1.0), e(1.0), 0.6)).unwrap();
        assert_eq!((v.predicted, v.row), (PredictedClass::GammaRadonifying, TableRow::First));
        assert_abs_diff_eq!(v.r.value(), 2.0, epsilon = 1e-12);

        let v = diag_classify(&DiagonalSpec::power_law(e(1.0), e(2.0), 0.0)).unwrap();
        assert_eq!((v.predicted, v.row), (PredictedClass::GammaRadonifying, TableRow::Second));
        assert!(v.r.is_inf());

        let v = diag_classify(&DiagonalSpec::power_law(e(2.0), e(2.0), 0.0)).unwrap();
        assert_eq!((v.predicted, v.row), (PredictedClass::Not, TableRow::Third));
        assert_eq!(v.evidence.last().unwrap().value, 65536.0);
    }

    #[test]
    fn first_row_exponent_identity() {
        for (p, q) in [(1.0, 1.0), (1.5, 2.0), (1.2, 1.7), (1.9, 10.0)] {
            let v = diag_classify(&DiagonalSpec::power_law(e(p), e(q), 1.0)).unwrap();
            if v.row == TableRow::First {
                assert_abs_diff_eq!(1.0 / v.r.value(), 0.5 - 1.0 / p + 1.0 / q, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn infinite_exponents_rejected() {
        assert!(diag_classify(&DiagonalSpec::power_law(Exponent::INF, e(2.0), 1.0)).is_err());
        assert!(diag_classify(&DiagonalSpec::power_law(e(2.0), Exponent::INF, 1.0)).is_err());
    }

    #[test]
    fn explicit_lists_are_members() {
        let spec = DiagonalSpec { p: e(2.0), q: e(2.0), sigma: SigmaRule::Explicit(vec![1.0, 1.0, 1.0]) };
        assert_eq!(diag_classify(&spec).unwrap().predicted, PredictedClass::GammaRadonifying);
    }

    #[test]
    fn zero_growth_is_all_zeros() {
        let spec = DiagonalSpec { p: e(2.0), q: e(2.0), sigma: SigmaRule::PowerLaw { scale: 0.0, alpha: 0.5 } };
        let t = diag_growth_experiment(&spec, &[2, 4, 8], &RandomPlan::default(), &WitnessBudget::default(), GrowthThresholds::default())
            .unwrap();
        assert!(t.rows.iter().all(|r| r.estimate.value == 0.0));
        assert_eq!(t.slope, 0.0);
    }

    #[test]
    fn hilbert_growth_tracks_frobenius() {
        let spec = DiagonalSpec::power_law(e(2.0), e(2.0), 0.4);
        let dims: Vec<usize> = (1..=6).map(|k| 1 << k).collect();
        let t = diag_growth_experiment(&spec, &dims, &RandomPlan::default(), &WitnessBudget::default(), GrowthThresholds::default())
            .unwrap();
        for row in &t.rows {
            let fro: f64 = (1..=row.dim).map(|n| (n as f64).powf(-0.8)).sum::<f64>().sqrt();
            assert_abs_diff_eq!(row.estimate.value, fro, epsilon = 1e-12);
        }
        assert!(t.slope >= 0.05);
        assert!(t.to_csv().starts_with("dim,value,kind,stderr\n2,"));
    }

    #[test]
    fn growth_rejects_bad_dims() {
        let spec = DiagonalSpec::power_law(e(2.0), e(2.0), 0.4);
        let plan = RandomPlan::default();
        let b = WitnessBudget::default();
        assert!(diag_growth_experiment(&spec, &[4, 2], &plan, &b, GrowthThresholds::default()).is_err());
        assert!(diag_growth_experiment(&spec, &[2, 256], &plan, &b, GrowthThresholds::default()).is_err());
    }
}
