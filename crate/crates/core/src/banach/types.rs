use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::p_norm;
use crate::randsums::rademacher_moment_with_cap;
use crate::seq::VectorFamily;
use crate::space::SpaceSpec;
use crate::witness::{search, WitnessBudget};

/// Best ratio over families of `budget.size_for(dim)` vectors; the basis (zero-padded) is the
/// first candidate.
fn best_ratio<F>(space: SpaceSpec, budget: &WitnessBudget, ratio: F) -> Result<f64>
where
    F: Fn(&VectorFamily, &[f64]) -> Result<f64> + Sync,
{
    let size = budget.size_for(space.dim);
    crate::enumerate::check_cap(size, budget.enum_cap)?;
    let basis = DMatrix::from_fn(space.dim, size, |i, j| if i == j { 1.0 } else { 0.0 });
    let w = search(space.dim, size, vec![basis], budget, |x| {
        let fam = VectorFamily::from_columns(space, x).expect("columns match the space");
        let norms = fam.norms();
        ratio(&fam, &norms).unwrap_or(f64::NAN)
    });
    Ok(w.value)
}

/// Lower bound on the type-`p` constant: `(E‖Σ r_n x_n‖²)^{1/2} / (Σ ‖x_n‖^p)^{1/p}`.
pub fn type_constant_lower(space: SpaceSpec, p: f64, budget: &WitnessBudget) -> Result<NormEstimate> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::precondition("type_constant_lower", format!("p in [1, 2], got {p}")));
    }
    let p = Exponent::new(p)?;
    let cap = budget.enum_cap;
    let v = best_ratio(space, budget, |fam, norms| {
        let den = p_norm(norms, p);
        if den == 0.0 {
            return Ok(f64::NAN);
        }
        Ok(rademacher_moment_with_cap(fam, 2.0, cap)? / den)
    })?;
    Ok(NormEstimate::lower(v, "witness families, exact Rademacher averages"))
}

/// Lower bound on the cotype-`q` constant: `(Σ ‖x_n‖^q)^{1/q} / (E‖Σ r_n x_n‖²)^{1/2}`.
pub fn cotype_constant_lower(space: SpaceSpec, q: Exponent, budget: &WitnessBudget) -> Result<NormEstimate> {
    if q.value() < 2.0 {
        return Err(Error::precondition("cotype_constant_lower", format!("q >= 2, got {q}")));
    }
    let cap = budget.enum_cap;
    let v = best_ratio(space, budget, |fam, norms| {
        let den = rademacher_moment_with_cap(fam, 2.0, cap)?;
        if den == 0.0 {
            return Ok(f64::NAN);
        }
        Ok(p_norm(norms, q) / den)
    })?;
    Ok(NormEstimate::lower(v, "witness families, exact Rademacher averages"))
}
