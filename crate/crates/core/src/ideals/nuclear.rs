use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::{frobenius, p_norm, svd};
use crate::seq::{weak_lp_norm, VectorFamily};
use crate::space::{Operator, SpaceSpec};

/// `u = Σ_n x*_n ⊗ y_n` with `(x*_n)` weakly summable and `(y_n)` bounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearRep {
    pub functionals: Vec<Vec<f64>>,
    pub vectors: Vec<Vec<f64>>,
    /// Singular values `τ_n` carried by the functionals.
    pub tau: Vec<f64>,
    /// Weak `ℓ_1` norm of the functionals (estimated).
    pub weak_l1: NormEstimate,
    /// `‖τ‖₂`, the Cauchy–Schwarz bound on `weak_l1`.
    pub tau_l2: f64,
    /// `max_n ‖y_n‖`.
    pub vectors_sup: f64,
    /// `‖Σ x*_n ⊗ y_n − u‖_F`.
    pub reconstruction_error: f64,
}

impl NuclearRep {
    pub fn reconstruct(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for (x, y) in self.functionals.iter().zip(&self.vectors) {
            m.ger(1.0, &DVector::from_column_slice(y), &DVector::from_column_slice(x), 1.0);
        }
        m
    }
}

/// Representation from the SVD `u = Σ τ_n ⟨·, e_n⟩ f_n`: `x*_n = τ_n e_n`, `y_n = f_n`.
pub fn weak_star_nuclear_rep(u: &Operator) -> Result<NuclearRep> {
    if !u.domain().exp.is_two() || !u.codomain().exp.is_two() {
        return Err(Error::precondition("weak_star_nuclear_rep", "l_2 domain and codomain"));
    }
    let (m, n) = u.matrix().shape();
    let dec = svd(u);
    let cutoff = dec.largest() * 1e-13;
    let mut functionals = Vec::new();
    let mut vectors = Vec::new();
    let mut tau = Vec::new();
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        functionals.push(dec.v_t.row(k).iter().map(|v| v * s).collect::<Vec<f64>>());
        vectors.push(dec.u.column(k).iter().copied().collect::<Vec<f64>>());
        tau.push(s);
    }
    let tau_l2 = p_norm(&tau, Exponent::TWO);
    let weak_l1 = if functionals.is_empty() {
        NormEstimate::exact(0.0, "empty representation")
    } else {
        weak_lp_norm(&VectorFamily::new(SpaceSpec::l2(n), functionals.clone())?, Exponent::ONE)?
    };
    if weak_l1.value > tau_l2 * (1.0 + 1e-10) + 1e-12 {
        return Err(Error::Numerical(format!("weak l_1 norm {} exceeds ‖τ‖₂ = {tau_l2}", weak_l1.value)));
    }
    let vectors_sup = vectors.iter().map(|y| p_norm(y, Exponent::TWO)).fold(0.0, f64::max);
    let mut rep = NuclearRep { functionals, vectors, tau, weak_l1, tau_l2, vectors_sup, reconstruction_error: 0.0 };
    rep.reconstruction_error = frobenius(&(rep.reconstruct(m, n) - u.matrix()));
    Ok(rep)
}
