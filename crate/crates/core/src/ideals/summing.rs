use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::{frobenius, svd_matrix};
use crate::randsums::{gaussian_moment, rademacher_moment_with_cap};
use crate::sampling::RandomPlan;
use crate::seq::{strong_lp_norm, weak_lp_norm_upper, VectorFamily};
use crate::space::Operator;
use crate::witness::{search, Witness, WitnessBudget};

/// Frobenius norm, checked against the `ℓ_2` norm of the singular values.
pub fn hs_norm(u: &Operator) -> Result<f64> {
    if !u.domain().exp.is_two() || !u.codomain().exp.is_two() {
        return Err(Error::precondition("hs_norm", "l_2 domain and codomain"));
    }
    let fro = frobenius(u.matrix());
    let sv = svd_matrix(u.matrix()).singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
    if (fro - sv).abs() > 1e-10 * fro.max(1.0) {
        return Err(Error::Numerical(format!("Frobenius {fro} disagrees with singular values {sv}")));
    }
    Ok(fro)
}

/// Deterministic first candidates: the domain basis and the right singular vectors.
fn candidates(u: &Operator, size: usize) -> Vec<DMatrix<f64>> {
    let n = u.domain().dim;
    let basis = DMatrix::from_fn(n, size, |i, j| if i == j { 1.0 } else { 0.0 });
    let v = svd_matrix(u.matrix()).v_t.transpose();
    let aligned = DMatrix::from_fn(n, size, |i, j| if j < v.ncols() { v[(i, j)] } else { 0.0 });
    vec![basis, aligned]
}

fn family(u: &Operator, x: &DMatrix<f64>) -> VectorFamily {
    VectorFamily::from_columns(u.domain(), x).expect("columns match the domain")
}

/// Best ratio `numerator(u·X) / weak_{ℓ_p}(X)` over searched families `X`, where the weak norm is
/// exact or an upper bound so every ratio is a valid lower bound.
fn witness_ratio<F>(u: &Operator, p: Exponent, budget: &WitnessBudget, numerator: F) -> Witness
where
    F: Fn(&VectorFamily) -> Option<f64> + Sync,
{
    let n = u.domain().dim;
    let size = budget.size_for(n);
    search(n, size, candidates(u, size), budget, |x| {
        let fam = family(u, x);
        let weak = match weak_lp_norm_upper(&fam, p, budget.enum_cap) {
            Ok(w) if w.value > 0.0 => w.value,
            _ => return f64::NAN,
        };
        let image = fam.image(u).expect("family lives in the domain");
        numerator(&image).map_or(f64::NAN, |v| v / weak)
    })
}

/// Lower bound on the p-summing norm `π_p(u)` from witness families.
pub fn pi_p_lower(u: &Operator, p: f64, budget: &WitnessBudget) -> Result<NormEstimate> {
    let p = Exponent::new(p)?;
    if p.is_inf() {
        return Err(Error::precondition("pi_p_lower", "finite p"));
    }
    if u.is_zero() {
        return Ok(NormEstimate::lower(0.0, "zero operator"));
    }
    let w = witness_ratio(u, p, budget, |image| Some(strong_lp_norm(image, p)));
    Ok(NormEstimate::lower(w.value, format!("best of {} witness families of size {}", budget.restarts, w.family.ncols())))
}

/// `(E‖Σ_k γ_k u e_k‖²)^{1/2}` over the basis of a Hilbert domain. Exact (the Hilbert–Schmidt
/// norm) for a Hilbert codomain, Monte Carlo otherwise.
pub fn gamma_norm_hilbert_domain(u: &Operator, plan: &RandomPlan) -> Result<NormEstimate> {
    if !u.domain().exp.is_two() {
        return Err(Error::precondition("gamma_norm_hilbert_domain", "an l_2 domain"));
    }
    let columns = VectorFamily::from_columns(u.codomain(), u.matrix())?;
    gaussian_moment(&columns, &plan.with_moment(2.0))
}

/// Lower bound on the γ-summing norm. Witnesses are scored with a short Monte Carlo run; the
/// winner is re-estimated on an independent stream with `plan.samples` samples and reported
/// as its 4σ lower confidence bound. Exact when the codomain is `ℓ_2`.
pub fn gamma_summing_lower(u: &Operator, budget: &WitnessBudget, plan: &RandomPlan) -> Result<NormEstimate> {
    plan.validate()?;
    if u.is_zero() {
        return Ok(NormEstimate::lower(0.0, "zero operator"));
    }
    let search_plan = plan.with_moment(2.0).with_samples(plan.samples.min(4096));
    let w = witness_ratio(u, Exponent::TWO, budget, |image| gaussian_moment(image, &search_plan).ok().map(|e| e.value));
    if u.codomain().exp.is_two() {
        return Ok(NormEstimate::lower(w.value, "exact Gaussian moments over witness families"));
    }
    let fam = family(u, &w.family);
    let weak = weak_lp_norm_upper(&fam, Exponent::TWO, budget.enum_cap)?.value;
    let fresh = plan.with_moment(2.0).with_seed(plan.seed ^ 0xA5A5_5A5A_0F0F_F0F0);
    let est = gaussian_moment(&fam.image(u)?, &fresh)?;
    let value = ((est.value - 4.0 * est.stderr) / weak).max(0.0);
    Ok(NormEstimate::lower(
        value,
        format!("4-sigma lower confidence bound; point estimate {:.10}", est.value / weak),
    ))
}

/// Lower bound on the Rademacher-summing norm with exact enumerated moments.
pub fn r_summing_lower(u: &Operator, budget: &WitnessBudget) -> Result<NormEstimate> {
    let size = budget.size_for(u.domain().dim);
    crate::enumerate::check_cap(size, budget.enum_cap)?;
    if u.is_zero() {
        return Ok(NormEstimate::lower(0.0, "zero operator"));
    }
    let cap = budget.enum_cap;
    let w = witness_ratio(u, Exponent::TWO, budget, |image| rademacher_moment_with_cap(image, 2.0, cap).ok());
    Ok(NormEstimate::lower(w.value, "exact Rademacher moments over witness families"))
}
