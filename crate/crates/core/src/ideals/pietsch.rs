//! Pietsch certificates for the 2-summing norm.
//!
//! A certificate is a probability vector `μ` on finitely many dual-ball points `x*_k` and a
//! constant `c` with `‖u x‖² ≤ c² Σ_k μ_k ⟨x, x*_k⟩²` for all `x`, i.e. `uᵀu ⪯ c² G(μ)`.
//! Any such pair bounds `π₂(u) ≤ c`, whether or not the points norm the domain.
//!
//! The smallest certified `c` is found from the conic form `min Σν s.t. Σ ν_k x*_k x*_kᵀ ⪰ uᵀu,
//! ν ≥ 0` (then `c² = Σν`, `μ = ν / Σν`), solved with a log-barrier Newton method in the span
//! of the points. The reported constant is recomputed from `μ` as a generalised eigenvalue so
//! it certifies exactly the weights it ships with.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::linalg::{frobenius, max_eigenvalue, min_eigenvalue, p_norm, range_basis, spectral_norm, svd_matrix};
use crate::sampling::sphere_net;
use crate::space::{Operator, SpaceSpec};

/// Regularisation added to `G(μ)` before eigen-solves.
pub const GRAM_RIDGE: f64 = 1e-12;
/// Allowed negative slack of `λ_min(c²G(μ) − uᵀu)`, relative to `c²`.
pub const DOMINATION_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PietschCertificate {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub constant: f64,
    /// True when `points` is the full extreme-point set of the dual ball, so that `constant`
    /// is (up to solver tolerance) the 2-summing norm itself.
    pub extreme_exact: bool,
}

/// Finite subset of the dual unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoints {
    pub points: Vec<Vec<f64>>,
    pub extreme_exact: bool,
}

/// Extreme points of the dual ball, one per antipodal pair (`x*` and `−x*` contribute the same
/// rank-one form): sign vectors for an `ℓ_1` domain, unit vectors for an `ℓ_∞` domain.
/// `None` for other exponents.
pub fn extreme_dual_points(domain: SpaceSpec, cap: usize) -> Result<Option<DualPoints>> {
    let n = domain.dim;
    if domain.exp.is_inf() {
        let points = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                e
            })
            .collect();
        return Ok(Some(DualPoints { points, extreme_exact: true }));
    }
    if domain.exp.is_one() {
        check_cap(n, cap)?;
        let points = (0..1u64 << (n - 1))
            .map(|bits| (0..n).map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect())
            .collect();
        return Ok(Some(DualPoints { points, extreme_exact: true }));
    }
    Ok(None)
}

/// Quasi-Monte-Carlo net of `size` points on the dual unit sphere.
pub fn dual_sphere_net(domain: SpaceSpec, size: usize) -> DualPoints {
    DualPoints { points: sphere_net(domain.dim, domain.exp.dual(), size), extreme_exact: false }
}

/// `±` right singular vectors of `u`; for a Hilbert domain these carry an optimal certificate.
pub fn singular_aligned_points(u: &Operator) -> DualPoints {
    let dec = svd_matrix(u.matrix());
    let mut points = Vec::new();
    for i in 0..dec.v_t.nrows() {
        let v: Vec<f64> = dec.v_t.row(i).iter().copied().collect();
        points.push(v.iter().map(|x| -x).collect());
        points.push(v);
    }
    // complete to a basis so the points span the domain
    let n = u.domain().dim;
    for k in dec.v_t.nrows()..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        points.push(e);
    }
    DualPoints { points, extreme_exact: false }
}

/// Extreme points when finite and enumerable, a dual-sphere net of `net_size` otherwise.
pub fn default_dual_points(domain: SpaceSpec, cap: usize, net_size: usize) -> Result<DualPoints> {
    Ok(extreme_dual_points(domain, cap)?.unwrap_or_else(|| dual_sphere_net(domain, net_size)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PietschConfig {
    /// Relative accuracy demanded of `c`.
    pub rel_tol: f64,
    pub max_newton: usize,
}

impl Default for PietschConfig {
    fn default() -> Self {
        PietschConfig { rel_tol: 1e-6, max_newton: 400 }
    }
}

fn gram(points: &[DVector<f64>], weights: &[f64]) -> DMatrix<f64> {
    let r = points.first().map_or(0, |p| p.len());
    let mut g = DMatrix::zeros(r, r);
    for (a, &w) in points.iter().zip(weights) {
        if w != 0.0 {
            g.ger(w, a, a, 1.0);
        }
    }
    g
}

/// `λ_max(L⁻¹ M L⁻ᵀ)` for `G + ridge·I = L Lᵀ`: the least `c²` with `c²(G + ridge) ⪰ M`.
fn generalized_max(m: &DMatrix<f64>, g: &DMatrix<f64>) -> Option<f64> {
    let r = g.nrows();
    let chol = Cholesky::new(g + DMatrix::identity(r, r) * (GRAM_RIDGE * g.trace().max(1.0) / r as f64))?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    Some(max_eigenvalue(&(&linv * m * linv.transpose())).max(0.0))
}

struct Barrier<'a> {
    points: &'a [DVector<f64>],
    target: &'a DMatrix<f64>,
}

impl Barrier<'_> {
    fn slack(&self, nu: &[f64]) -> DMatrix<f64> {
        gram(self.points, nu) - self.target
    }

    /// `t·Σν − log det S − Σ log ν`, or `None` outside the domain.
    fn value(&self, nu: &[f64], t: f64) -> Option<f64> {
        if nu.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let chol = Cholesky::new(self.slack(nu))?;
        let logdet: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Some(t * nu.iter().sum::<f64>() - logdet - nu.iter().map(|v| v.ln()).sum::<f64>())
    }

    fn newton_step(&self, nu: &[f64], t: f64) -> Option<(DVector<f64>, f64)> {
        let k = nu.len();
        let chol = Cholesky::new(self.slack(nu))?;
        let sinv_a: Vec<DVector<f64>> = self.points.iter().map(|a| chol.solve(a)).collect();
        let mut grad = DVector::zeros(k);
        let mut hess = DMatrix::zeros(k, k);
        for i in 0..k {
            grad[i] = t - self.points[i].dot(&sinv_a[i]) - 1.0 / nu[i];
            for j in i..k {
                let v = self.points[i].dot(&sinv_a[j]).powi(2);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
            hess[(i, i)] += 1.0 / (nu[i] * nu[i]);
        }
        // duplicated or nearly parallel points make the Hessian numerically singular near the
        // boundary; damp until the factorisation succeeds
        let diag = hess.diagonal();
        let chol_h = [0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2].iter().find_map(|&damp| {
            let mut h = hess.clone();
            for i in 0..k {
                h[(i, i)] += damp * diag[i];
            }
            Cholesky::new(h)
        })?;
        let step = chol_h.solve(&(-&grad));
        let decrement = -grad.dot(&step);
        Some((step, decrement))
    }
}

/// Minimises `Σν` subject to `Σ ν_k a_k a_kᵀ ⪰ target`. Points must span the space.
fn solve_conic(points: &[DVector<f64>], target: &DMatrix<f64>, cfg: &PietschConfig) -> Result<Vec<f64>> {
    let k = points.len();
    let r = target.nrows();
    let uniform = vec![1.0 / k as f64; k];
    let lam = generalized_max(target, &gram(points, &uniform))
        .ok_or_else(|| Error::Numerical("Gram matrix of the dual points is singular".into()))?;
    let mut nu: Vec<f64> = uniform.iter().map(|w| w * (2.0 * lam + 1e-3)).collect();
    let barrier = Barrier { points, target };
    let params = (r + k) as f64;
    let mut t = params / nu.iter().sum::<f64>();
    let mut newton_used = 0;
    // the barrier gap (r+K)/t bounds the suboptimality of Σν
    let gap_tol = 1e-2 * cfg.rel_tol.min(1e-6);
    loop {
        loop {
            if newton_used >= cfg.max_newton {
                break;
            }
            let Some((step, decrement)) = barrier.newton_step(&nu, t) else {
                return Err(Error::Numerical("barrier Newton system is not positive definite".into()));
            };
            newton_used += 1;
            if decrement / 2.0 <= 1e-10 {
                break;
            }
            let f0 = barrier.value(&nu, t).expect("iterate stays interior");
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha > 1e-12 {
                let cand: Vec<f64> = nu.iter().zip(step.iter()).map(|(v, d)| v + alpha * d).collect();
                if let Some(f1) = barrier.value(&cand, t) {
                    if f1 <= f0 - 0.25 * alpha * decrement {
                        nu = cand;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let total: f64 = nu.iter().sum();
        if params / t <= gap_tol * total || newton_used >= cfg.max_newton {
            return Ok(nu);
        }
        t *= 8.0;
    }
}

/// Certified upper bound on `π₂(u)` from the dual points `k`, with its certificate.
pub fn pi_2_upper(u: &Operator, k: &DualPoints) -> Result<(NormEstimate, PietschCertificate)> {
    pi_2_upper_with(u, k, &PietschConfig::default())
}

pub fn pi_2_upper_with(u: &Operator, k: &DualPoints, cfg: &PietschConfig) -> Result<(NormEstimate, PietschCertificate)> {
    let n = u.domain().dim;
    if k.points.is_empty() {
        return Err(Error::precondition("pi_2_upper", "a nonempty set of dual points"));
    }
    let dual = u.domain().exp.dual();
    for (i, x) in k.points.iter().enumerate() {
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!("dual point {i} has length {} (domain dim {n})", x.len())));
        }
        let norm = p_norm(x, dual);
        if norm > 1.0 + 1e-9 {
            return Err(Error::precondition("pi_2_upper", format!("dual point {i} has dual norm {norm} > 1")));
        }
    }
    let meta = |c: &PietschCertificate| {
        format!(
            "Pietsch certificate on {} dual points ({})",
            c.points.len(),
            if c.extreme_exact { "full extreme-point set" } else { "partial set, bound may be loose" }
        )
    };
    if u.is_zero() {
        let cert = PietschCertificate {
            points: k.points.clone(),
            weights: vec![1.0 / k.points.len() as f64; k.points.len()],
            constant: 0.0,
            extreme_exact: k.extreme_exact,
        };
        return Ok((NormEstimate::upper(0.0, meta(&cert)), cert));
    }

    let pm = DMatrix::from_fn(n, k.points.len(), |i, j| k.points[j][i]);
    let basis = range_basis(&pm, 1e-12);
    let a = u.matrix();
    let outside = frobenius(&(a - a * &basis * basis.transpose()));
    if basis.ncols() == 0 || outside > 1e-9 * frobenius(a) {
        return Err(Error::NoCertificate("the dual points do not span the row space of the operator".into()));
    }

    // work in the span of the points, with the target scaled to unit spectral norm
    let scale = spectral_norm(a).powi(2);
    let reduced: Vec<DVector<f64>> =
        k.points.iter().map(|x| basis.transpose() * DVector::from_column_slice(x)).collect();
    let target = basis.transpose() * (a.transpose() * a) * &basis / scale;
    let nu = solve_conic(&reduced, &target, cfg)?;
    let total: f64 = nu.iter().sum();
    let weights: Vec<f64> = nu.iter().map(|v| v / total).collect();

    let c2 = generalized_max(&target, &gram(&reduced, &weights))
        .ok_or_else(|| Error::Numerical("weighted Gram matrix is singular".into()))?;
    // absorb the ridge (and rounding) so the shipped constant passes its own check
    let constant = (c2 * scale).sqrt() * (1.0 + 1e-9);
    let cert = PietschCertificate { points: k.points.clone(), weights, constant, extreme_exact: k.extreme_exact };
    verify_certificate(u, &cert)?;
    Ok((NormEstimate::upper(constant, meta(&cert)), cert))
}

/// Numerical facts about a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// `λ_min(c² G(μ) − uᵀu)`.
    pub min_eigenvalue: f64,
    pub max_dual_norm: f64,
    pub weight_sum: f64,
}

/// Checks the simplex, dual-ball and domination invariants; errors if any fails.
pub fn verify_certificate(u: &Operator, cert: &PietschCertificate) -> Result<CertificateCheck> {
    let n = u.domain().dim;
    if cert.points.len() != cert.weights.len() || cert.points.is_empty() {
        return Err(Error::InvalidCertificate("points and weights must be nonempty and of equal length".into()));
    }
    if cert.points.iter().any(|x| x.len() != n) {
        return Err(Error::InvalidCertificate(format!("points must have length {n}")));
    }
    if cert.weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::InvalidCertificate("negative weight".into()));
    }
    let weight_sum: f64 = cert.weights.iter().sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidCertificate(format!("weights sum to {weight_sum}")));
    }
    let dual = u.domain().exp.dual();
    let max_dual_norm = cert.points.iter().map(|x| p_norm(x, dual)).fold(0.0, f64::max);
    if max_dual_norm > 1.0 + 1e-9 {
        return Err(Error::InvalidCertificate(format!("a point has dual norm {max_dual_norm}")));
    }
    if cert.constant.is_nan() || cert.constant < 0.0 {
        return Err(Error::InvalidCertificate("negative constant".into()));
    }
    let pts: Vec<DVector<f64>> = cert.points.iter().map(|x| DVector::from_column_slice(x)).collect();
    let c2 = cert.constant * cert.constant;
    let a = u.matrix();
    let diff = gram(&pts, &cert.weights) * c2 - a.transpose() * a;
    let min_eigenvalue = min_eigenvalue(&diff);
    let scale = c2.max(spectral_norm(a).powi(2));
    if min_eigenvalue < -DOMINATION_SLACK * scale {
        return Err(Error::InvalidCertificate(format!("domination fails: minimum eigenvalue {min_eigenvalue:e}")));
    }
    Ok(CertificateCheck { min_eigenvalue, max_dual_norm, weight_sum })
}

/// `u = û ∘ j` through `L₂(μ)`: `j x = (⟨x, x*_k⟩)_k` and `û` of norm at most the constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PietschFactorization {
    /// `K × n`; rows are the certificate points.
    pub j: Vec<Vec<f64>>,
    /// `m × K`, acting on `L₂(μ)` coordinates.
    pub u_hat: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// `‖û : L₂(μ) → ℓ_2^m‖`.
    pub u_hat_norm: f64,
    /// `‖û ∘ j − u‖_F`.
    pub residual: f64,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Builds the factorization induced by a valid certificate. `û = u G(μ)⁺ Jᵀ diag(μ)`, the
/// least-norm solution of `û J = u` in the `L₂(μ)` metric.
pub fn pietsch_factorize(u: &Operator, cert: &PietschCertificate) -> Result<PietschFactorization> {
    verify_certificate(u, cert)?;
    let n = u.domain().dim;
    let m = u.codomain().dim;
    let kk = cert.points.len();
    let j = DMatrix::from_fn(kk, n, |r, c| cert.points[r][c]);
    let a = u.matrix();

    let u_hat = if u.is_zero() {
        DMatrix::zeros(m, kk)
    } else {
        let pts: Vec<DVector<f64>> = cert.points.iter().map(|x| DVector::from_column_slice(x)).collect();
        let g = gram(&pts, &cert.weights);
        let basis = range_basis(&g, 1e-12);
        let reduced = basis.transpose() * &g * &basis;
        let inv = reduced
            .try_inverse()
            .ok_or_else(|| Error::InvalidCertificate("weighted Gram matrix is singular on its range".into()))?;
        let g_pinv = &basis * inv * basis.transpose();
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&cert.weights));
        a * g_pinv * j.transpose() * d
    };

    let residual = frobenius(&(&u_hat * &j - a));
    let active: Vec<usize> = (0..kk).filter(|&i| cert.weights[i] > 0.0).collect();
    let scaled = DMatrix::from_fn(m, active.len(), |r, c| u_hat[(r, active[c])] / cert.weights[active[c]].sqrt());
    let u_hat_norm = spectral_norm(&scaled);
    if u_hat_norm > cert.constant * (1.0 + 1e-6) + 1e-12 {
        return Err(Error::Numerical(format!(
            "factor norm {u_hat_norm} exceeds certificate constant {}",
            cert.constant
        )));
    }
    Ok(PietschFactorization { j: rows_of(&j), u_hat: rows_of(&u_hat), weights: cert.weights.clone(), u_hat_norm, residual })
}

/// Default conventions: extreme points for `ℓ_1`/`ℓ_∞` domains, the right singular vectors for
/// `ℓ_2` (optimal there), and a 128-point net joined with those vectors otherwise.
pub fn pi_2_upper_default(u: &Operator) -> Result<(NormEstimate, PietschCertificate)> {
    if let Some(k) = extreme_dual_points(u.domain(), DEFAULT_ENUM_CAP)? {
        return pi_2_upper(u, &k);
    }
    // the certificate depends on ⟨x, x*⟩² only, so one point per antipodal pair suffices
    let n = u.domain().dim;
    let v_t = svd_matrix(u.matrix()).v_t;
    let mut aligned: Vec<Vec<f64>> = v_t.row_iter().map(|r| r.iter().copied().collect()).collect();
    aligned.extend((v_t.nrows()..n).map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()));
    let mut points = if u.domain().exp.is_two() { Vec::new() } else { dual_sphere_net(u.domain(), 128).points };
    let dual = u.domain().exp.dual();
    points.extend(aligned.into_iter().map(|v| {
        let n = p_norm(&v, dual);
        v.into_iter().map(|x| x / n).collect()
    }));
    pi_2_upper(u, &DualPoints { points, extreme_exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;
    use approx::assert_abs_diff_eq;

    fn pm_e(n: usize) -> DualPoints {
        let mut points = Vec::new();
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            points.push(e.clone());
            e[k] = -1.0;
            points.push(e);
        }
        DualPoints { points, extreme_exact: true }
    }

    #[test]
    fn identity_linf_to_l2_uniform_certificate() {
        let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
        let (est, cert) = pi_2_upper(&u, &pm_e(2)).unwrap();
        assert_abs_diff_eq!(est.value, 2f64.sqrt(), epsilon = 1e-6);
        for w in &cert.weights {
            assert_abs_diff_eq!(*w, 0.25, epsilon = 1e-6);
        }
        let check = verify_certificate(&u, &cert).unwrap();
        assert!(check.min_eigenvalue >= -1e-8 * cert.constant.powi(2));
    }

    #[test]
    fn zero_operator_has_zero_constant() {
        let u = Operator::new(DMatrix::zeros(2, 2), Exponent::INF, Exponent::TWO).unwrap();
        let (est, cert) = pi_2_upper(&u, &pm_e(2)).unwrap();
        assert_eq!(est.value, 0.0);
        let f = pietsch_factorize(&u, &cert).unwrap();
        assert_eq!(f.u_hat_norm, 0.0);
        assert_eq!(f.residual, 0.0);
    }

    #[test]
    fn hilbert_identity_on_sphere_net() {
        let u = Operator::identity(2, Exponent::TWO, Exponent::TWO).unwrap();
        let (est, _) = pi_2_upper(&u, &dual_sphere_net(u.domain(), 64)).unwrap();
        let hs = 2f64.sqrt();
        assert!(est.value >= hs - 1e-9 && est.value <= hs * 1.05, "{}", est.value);
    }

    #[test]
    fn singular_aligned_net_pinches_hs() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.2, 0.0, 1.0]);
        let u = Operator::new(a.clone(), Exponent::TWO, Exponent::TWO).unwrap();
        let (est, _) = pi_2_upper(&u, &singular_aligned_points(&u)).unwrap();
        assert_abs_diff_eq!(est.value, frobenius(&a), epsilon = 1e-6 * frobenius(&a));
    }

    #[test]
    fn factorization_of_identity() {
        let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
        let (_, cert) = pi_2_upper(&u, &pm_e(2)).unwrap();
        let f = pietsch_factorize(&u, &cert).unwrap();
        assert!(f.residual <= 1e-10, "{}", f.residual);
        assert_abs_diff_eq!(f.u_hat_norm, 2f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn non_spanning_points_give_no_certificate() {
        let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
        let k = DualPoints { points: vec![vec![1.0, 0.0]], extreme_exact: false };
        assert!(matches!(pi_2_upper(&u, &k), Err(Error::NoCertificate(_))));
        // but a rank-one operator on that axis is fine
        let v = Operator::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), Exponent::INF, Exponent::TWO)
            .unwrap();
        let (est, _) = pi_2_upper(&v, &k).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_points_outside_dual_ball() {
        let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
        let k = DualPoints { points: vec![vec![1.0, 1.0], vec![0.0, 1.0]], extreme_exact: false };
        assert!(pi_2_upper(&u, &k).is_err());
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
        let (_, mut cert) = pi_2_upper(&u, &pm_e(2)).unwrap();
        cert.constant *= 0.9;
        assert!(matches!(pietsch_factorize(&u, &cert), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn l1_domain_extreme_points_are_sign_vectors() {
        let k = extreme_dual_points(SpaceSpec::l1(3), DEFAULT_ENUM_CAP).unwrap().unwrap();
        assert_eq!(k.points.len(), 4);
        assert!(k.points.iter().all(|x| x[0] == 1.0 && x.iter().all(|v| v.abs() == 1.0)));
    }
}
