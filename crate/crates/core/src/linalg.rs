//! Dense helpers shared by every norm computation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::exponent::Exponent;
use crate::space::Operator;

/// `(Σ|x_i|^p)^{1/p}`, or `max|x_i|` for `p = ∞`. Zero for the empty vector.
pub fn p_norm(x: &[f64], p: Exponent) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    if p.is_inf() {
        return x.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p.is_one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p.is_two() {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    // scale by the max entry so large p does not overflow
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let e = p.value();
    scale * x.iter().map(|v| (v.abs() / scale).powf(e)).sum::<f64>().powf(1.0 / e)
}

/// Norming functional of `y` in `ℓ_q`: the `z` with `‖z‖_{q*} = 1` and `⟨z, y⟩ = ‖y‖_q`.
/// Returns zeros for `y = 0`.
pub fn norming_functional(y: &[f64], q: Exponent) -> Vec<f64> {
    let norm = p_norm(y, q);
    if norm == 0.0 {
        return vec![0.0; y.len()];
    }
    if q.is_one() {
        return y.iter().map(|&v| sign(v)).collect();
    }
    if q.is_inf() {
        let k = argmax_abs(y);
        let mut z = vec![0.0; y.len()];
        z[k] = sign(y[k]);
        return z;
    }
    let e = q.value() - 1.0;
    y.iter().map(|&v| sign(v) * (v.abs() / norm).powf(e)).collect()
}

/// Maximizer of `⟨z, x⟩` over the unit ball of `ℓ_p`; the norming functional of `z` in `ℓ_{p*}`.
pub fn ball_maximizer(z: &[f64], p: Exponent) -> Vec<f64> {
    norming_functional(z, p.dual())
}

pub(crate) fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn argmax_abs(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in y.iter().enumerate() {
        if v.abs() > y[best].abs() {
            best = i;
        }
    }
    best
}

pub fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn column(a: &DMatrix<f64>, j: usize) -> Vec<f64> {
    a.column(j).iter().copied().collect()
}

pub fn row(a: &DMatrix<f64>, i: usize) -> Vec<f64> {
    a.row(i).iter().copied().collect()
}

/// Singular value decomposition `A = U diag(σ) Vᵀ` with `σ` nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// `m × r` left singular vectors.
    pub u: DMatrix<f64>,
    /// `r × n`, rows are right singular vectors.
    pub v_t: DMatrix<f64>,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&DVector::from_column_slice(&self.singular_values));
        &self.u * s * &self.v_t
    }
}

pub fn svd(u: &Operator) -> Svd {
    svd_matrix(u.matrix())
}

pub fn svd_matrix(a: &DMatrix<f64>) -> Svd {
    let dec = nalgebra::SVD::new(a.clone(), true, true);
    let mut singular_values: Vec<f64> = dec.singular_values.iter().copied().collect();
    for s in &mut singular_values {
        // nalgebra occasionally returns -0.0 for exact zeros
        *s = s.max(0.0);
    }
    Svd {
        singular_values,
        u: dec.u.expect("requested left vectors"),
        v_t: dec.v_t.expect("requested right vectors"),
    }
}

/// Largest singular value, i.e. the `ℓ_2 → ℓ_2` norm.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    // eigen of the smaller Gram matrix
    let g = if a.nrows() <= a.ncols() { a * a.transpose() } else { a.transpose() * a };
    max_eigenvalue(&g).max(0.0).sqrt()
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(sym)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(sym)).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum eigenpair of a symmetric matrix.
pub fn min_eigenpair(sym: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(symmetrize(sym));
    let mut k = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[k] {
            k = i;
        }
    }
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

/// Orthonormal basis (as columns) of the column space of `a`, using relative rank tolerance `rtol`.
pub fn range_basis(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let dec = svd_matrix(a);
    let cutoff = dec.largest() * rtol;
    let r = dec.singular_values.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    dec.u.columns(0, r).into_owned()
}
