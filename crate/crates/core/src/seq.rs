//! Weak and strong `ℓ_p` norms of finite vector families.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, max_over_signs, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::p_norm;
use crate::opnorm::{default_starts, exact_rule, multistart, op_norm_matrix, op_norm_upper, AscentConfig};
use crate::sampling::sphere_net;
use crate::space::{Operator, SpaceSpec};

/// An ordered list `x_1, …, x_N` in a common space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorFamily {
    pub space: SpaceSpec,
    pub vectors: Vec<Vec<f64>>,
}

impl VectorFamily {
    pub fn new(space: SpaceSpec, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if space.dim == 0 {
            return Err(Error::DimensionMismatch("space dimension must be positive".into()));
        }
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != space.dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector {i} has length {} but the space has dimension {}",
                v.len(),
                space.dim
            )));
        }
        Ok(VectorFamily { space, vectors })
    }

    /// The family formed by the columns of `m`.
    pub fn from_columns(space: SpaceSpec, m: &DMatrix<f64>) -> Result<Self> {
        let vectors = (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect();
        VectorFamily::new(space, vectors)
    }

    /// `e_1, …, e_n` of the space.
    pub fn standard_basis(space: SpaceSpec) -> Self {
        let vectors = (0..space.dim)
            .map(|k| {
                let mut e = vec![0.0; space.dim];
                e[k] = 1.0;
                e
            })
            .collect();
        VectorFamily { space, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `dim × N` matrix whose columns are the family members.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.space.dim, self.len(), |i, j| self.vectors[j][i])
    }

    /// `(u x_n)_n` in the codomain of `u`.
    pub fn image(&self, u: &Operator) -> Result<VectorFamily> {
        if u.domain().dim != self.space.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator domain has dimension {} but the family lives in dimension {}",
                u.domain().dim,
                self.space.dim
            )));
        }
        let vectors = self
            .vectors
            .iter()
            .map(|x| (u.matrix() * DVector::from_column_slice(x)).iter().copied().collect())
            .collect();
        Ok(VectorFamily { space: u.codomain(), vectors })
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|x| self.space.norm(x)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNormConfig {
    pub ascent: AscentConfig,
    /// Points of the quasi-Monte-Carlo dual-sphere net screened before ascent.
    pub net_size: usize,
}

impl Default for WeakNormConfig {
    fn default() -> Self {
        WeakNormConfig { ascent: AscentConfig::default(), net_size: 4096 }
    }
}

/// `sup_{‖x*‖ ≤ 1} (Σ_n |⟨x_n, x*⟩|^p)^{1/p}`.
pub fn weak_lp_norm(fam: &VectorFamily, p: Exponent) -> Result<NormEstimate> {
    weak_lp_norm_with(fam, p, &WeakNormConfig::default())
}

/// The evaluation map `x* ↦ (⟨x_n, x*⟩)_n`, an `N × dim` matrix on the dual space.
fn evaluation_map(fam: &VectorFamily) -> DMatrix<f64> {
    fam.matrix().transpose()
}

/// Exact value when the dual ball has enumerable extreme points or a closed rule applies.
fn weak_exact(fam: &VectorFamily, p: Exponent, cap: usize) -> Option<Result<NormEstimate>> {
    if fam.is_empty() {
        return Some(Ok(NormEstimate::exact(0.0, "empty family")));
    }
    let a = evaluation_map(fam);
    let dual = fam.space.exp.dual();
    if exact_rule(&a, dual, p).is_some() {
        let cfg = AscentConfig { enum_cap: cap, ..AscentConfig::default() };
        return Some(op_norm_matrix(&a, dual, p, &cfg).map(|e| match fam.space.exp {
            s if s.is_inf() => NormEstimate::exact(e.value, "extreme points ±e_k of the l_1 dual ball"),
            _ => e,
        }));
    }
    if dual.is_inf() {
        // dual ball is the cube: a convex objective peaks at a sign vector
        return Some(check_cap(fam.space.dim, cap).map(|_| {
            let v = max_over_signs(&a, |y| p_norm(y, p)).0;
            NormEstimate::exact(v, "sign-vector extreme points of the l_inf dual ball")
        }));
    }
    None
}

pub fn weak_lp_norm_with(fam: &VectorFamily, p: Exponent, cfg: &WeakNormConfig) -> Result<NormEstimate> {
    if let Some(exact) = weak_exact(fam, p, cfg.ascent.enum_cap) {
        return exact;
    }
    let a = evaluation_map(fam);
    let dual = fam.space.exp.dual();
    let dim = fam.space.dim;

    let net = sphere_net(dim, dual, cfg.net_size);
    let mut scored: Vec<(f64, usize)> = net
        .iter()
        .enumerate()
        .map(|(i, x)| (p_norm((&a * DVector::from_column_slice(x)).as_slice(), p), i))
        .collect();
    // best first, index breaks ties
    scored.sort_by(|l, r| r.0.total_cmp(&l.0).then(l.1.cmp(&r.1)));
    let mut starts = default_starts(dim, dual, &cfg.ascent);
    starts.extend(scored.iter().take(cfg.ascent.starts).map(|&(_, i)| net[i].clone()));
    let (v, _) = multistart(&a, dual, p, &starts, cfg.ascent.iters, cfg.ascent.tol);
    Ok(NormEstimate::lower(v, format!("{}-point dual sphere net refined by ascent", cfg.net_size)))
}

/// Exact where available, otherwise a certified upper bound. Used as the denominator of witness
/// ratios, where an underestimate would make the ratio unsound.
pub fn weak_lp_norm_upper(fam: &VectorFamily, p: Exponent, cap: usize) -> Result<NormEstimate> {
    if let Some(exact) = weak_exact(fam, p, cap) {
        return exact;
    }
    Ok(op_norm_upper(&evaluation_map(fam), fam.space.exp.dual(), p, cap))
}

/// `(Σ_n ‖x_n‖^p)^{1/p}`.
pub fn strong_lp_norm(fam: &VectorFamily, p: Exponent) -> f64 {
    p_norm(&fam.norms(), p)
}

/// `max_{ε ∈ {±1}^N} ‖Σ ε_n x_n‖` by exhaustive enumeration.
pub fn sign_sup_norm(fam: &VectorFamily) -> Result<f64> {
    sign_sup_norm_with_cap(fam, DEFAULT_ENUM_CAP)
}

pub fn sign_sup_norm_with_cap(fam: &VectorFamily, cap: usize) -> Result<f64> {
    check_cap(fam.len(), cap)?;
    let exp = fam.space.exp;
    Ok(max_over_signs(&fam.matrix(), |y| p_norm(y, exp)).0)
}
