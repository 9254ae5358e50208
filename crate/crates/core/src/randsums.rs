//! Moments of Rademacher and Gaussian sums `Σ ε_n x_n`, `Σ γ_n x_n`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, mean_over_signs, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::linalg::p_norm;
use crate::sampling::{gaussian, gaussian_matrix, stream_rng, Purpose, RandomPlan, MC_BLOCK};
use crate::seq::{strong_lp_norm, VectorFamily};

/// `m₁ = E|γ| = √(2/π)`.
pub const M1: f64 = 0.797_884_560_802_865_4;

fn check_moment(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(Error::precondition("moment", format!("finite p >= 1, got {p}")));
    }
    Ok(())
}

/// `(E‖Σ r_n x_n‖^p)^{1/p}` averaged over all `2^N` sign patterns.
pub fn rademacher_moment(fam: &VectorFamily, p: f64) -> Result<f64> {
    rademacher_moment_with_cap(fam, p, DEFAULT_ENUM_CAP)
}

pub fn rademacher_moment_with_cap(fam: &VectorFamily, p: f64, cap: usize) -> Result<f64> {
    check_moment(p)?;
    check_cap(fam.len(), cap)?;
    let exp = fam.space.exp;
    let mean = mean_over_signs(&fam.matrix(), |y| p_norm(y, exp).powf(p));
    Ok(mean.powf(1.0 / p))
}

/// Running mean, variance and covariance of two observables (Welford, Chan merge).
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    mean: [f64; 2],
    m2: [f64; 2],
    cross: f64,
}

impl Moments {
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1.0;
        let da = a - self.mean[0];
        let db = b - self.mean[1];
        self.mean[0] += da / self.n;
        self.mean[1] += db / self.n;
        self.m2[0] += da * (a - self.mean[0]);
        self.m2[1] += db * (b - self.mean[1]);
        self.cross += da * (b - self.mean[1]);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let da = o.mean[0] - self.mean[0];
        let db = o.mean[1] - self.mean[1];
        let w = self.n * o.n / n;
        Moments {
            n,
            mean: [self.mean[0] + da * o.n / n, self.mean[1] + db * o.n / n],
            m2: [self.m2[0] + o.m2[0] + da * da * w, self.m2[1] + o.m2[1] + db * db * w],
            cross: self.cross + o.cross + da * db * w,
        }
    }

    /// Sample covariance matrix entries `(var_a, var_b, cov_ab)`.
    fn covariance(&self) -> (f64, f64, f64) {
        if self.n < 2.0 {
            return (0.0, 0.0, 0.0);
        }
        let d = self.n - 1.0;
        (self.m2[0].max(0.0) / d, self.m2[1].max(0.0) / d, self.cross / d)
    }
}

/// Draws `plan.samples` Gaussian sums `Σ γ_n x_n` in fixed blocks, each block on its own
/// stream, and reduces the blocks in index order.
fn gaussian_norm_powers(fam: &VectorFamily, plan: &RandomPlan, powers: [f64; 2]) -> Moments {
    let x = fam.matrix();
    let n = fam.len();
    let exp = fam.space.exp;
    let blocks = plan.samples.div_ceil(MC_BLOCK);
    let per_block: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(plan.seed, Purpose::MonteCarlo, b as u64);
            let count = MC_BLOCK.min(plan.samples - b * MC_BLOCK);
            let mut acc = Moments::default();
            let mut g = DVector::zeros(n);
            for _ in 0..count {
                g.iter_mut().for_each(|v| *v = gaussian(&mut rng));
                let y = &x * &g;
                let norm = p_norm(y.as_slice(), exp);
                acc.push(norm.powf(powers[0]), norm.powf(powers[1]));
            }
            acc
        })
        .collect();
    per_block.into_iter().fold(Moments::default(), Moments::merge)
}

/// `(E‖Σ γ_n x_n‖^p)^{1/p}` with `p = plan.moment_p`.
///
/// Exact for square moments in `ℓ_2` (Gaussian orthonormality gives the strong `ℓ_2` norm);
/// Monte Carlo otherwise, with the standard error propagated through `t ↦ t^{1/p}`.
pub fn gaussian_moment(fam: &VectorFamily, plan: &RandomPlan) -> Result<NormEstimate> {
    plan.validate()?;
    let p = plan.moment_p;
    if fam.is_empty() || fam.vectors.iter().all(|v| v.iter().all(|&c| c == 0.0)) {
        return Ok(NormEstimate::exact(0.0, "zero family"));
    }
    if p == 2.0 && fam.space.exp.is_two() {
        return Ok(NormEstimate::exact(strong_lp_norm(fam, Exponent::TWO), "Gaussian orthonormality in l_2"));
    }
    let m = gaussian_norm_powers(fam, plan, [p, p]);
    let mean = m.mean[0].max(0.0);
    let (var, _, _) = m.covariance();
    let se_mean = (var / m.n).sqrt();
    let value = mean.powf(1.0 / p);
    let stderr = if mean > 0.0 { value / (p * mean) * se_mean } else { 0.0 };
    Ok(NormEstimate::monte_carlo(value, stderr, format!("{} samples, seed {}", plan.samples, plan.seed)))
}

/// Which side of 1 the Khintchine ratio is forced onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcedBound {
    AtMostOne,
    AtLeastOne,
    EqualsOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineReport {
    pub p: f64,
    pub ratio: f64,
    pub forced: ForcedBound,
    pub holds: bool,
}

/// `(E|Σ a_n r_n|^p)^{1/p} / ‖a‖_2`, exact by enumeration, with the forced comparison to 1
/// (`≤ 1` for `p ≤ 2`, `≥ 1` for `p ≥ 2`).
pub fn khintchine_ratio(a: &[f64], p: f64) -> Result<KhintchineReport> {
    check_moment(p)?;
    let l2 = p_norm(a, Exponent::TWO);
    if l2 == 0.0 {
        return Err(Error::precondition("khintchine_ratio", "a nonzero coefficient vector"));
    }
    let fam = VectorFamily::new(crate::SpaceSpec::l1(1), a.iter().map(|&c| vec![c]).collect())?;
    let ratio = rademacher_moment(&fam, p)? / l2;
    const SLACK: f64 = 1e-12;
    let (forced, holds) = if p < 2.0 {
        (ForcedBound::AtMostOne, ratio <= 1.0 + SLACK)
    } else if p > 2.0 {
        (ForcedBound::AtLeastOne, ratio >= 1.0 - SLACK)
    } else {
        (ForcedBound::EqualsOne, (ratio - 1.0).abs() <= SLACK)
    };
    Ok(KhintchineReport { p, ratio, forced, holds })
}

/// `(E‖Σ r_n x_n‖^q)^{1/q} / (E‖Σ r_n x_n‖^p)^{1/p}` by enumeration.
pub fn kahane_ratio(fam: &VectorFamily, p: f64, q: f64) -> Result<f64> {
    let num = rademacher_moment(fam, q)?;
    let den = rademacher_moment(fam, p)?;
    if den == 0.0 {
        return Err(Error::precondition("kahane_ratio", "a family with a nonzero Rademacher sum"));
    }
    Ok(num / den)
}

/// Gaussian analogue of [`kahane_ratio`] by Monte Carlo; both moments come from the same
/// samples and the delta-method stderr accounts for their covariance.
pub fn kahane_ratio_gaussian(fam: &VectorFamily, p: f64, q: f64, plan: &RandomPlan) -> Result<NormEstimate> {
    check_moment(p)?;
    check_moment(q)?;
    plan.validate()?;
    let m = gaussian_norm_powers(fam, plan, [q, p]);
    let (ma, mb) = (m.mean[0], m.mean[1]);
    if ma <= 0.0 || mb <= 0.0 {
        return Err(Error::precondition("kahane_ratio_gaussian", "a nonzero family"));
    }
    let r = ma.powf(1.0 / q) / mb.powf(1.0 / p);
    let (va, vb, cab) = m.covariance();
    let (ga, gb) = (r / (q * ma), -r / (p * mb));
    let var = (ga * ga * va + gb * gb * vb + 2.0 * ga * gb * cab) / m.n;
    Ok(NormEstimate::monte_carlo(r, var.max(0.0).sqrt(), format!("{} samples, seed {}", plan.samples, plan.seed)))
}

/// One Haar-distributed orthogonal matrix: QR of an i.i.d. Gaussian matrix with the signs of
/// `diag(R)` moved into `Q`.
pub fn haar_orthogonal(n: usize, plan: &RandomPlan) -> Result<DMatrix<f64>> {
    haar_sample(n, plan.seed, 0)
}

/// The `index`-th draw of the Haar sequence for `seed`.
pub fn haar_sample(n: usize, seed: u64, index: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::precondition("haar_orthogonal", "n >= 1"));
    }
    let mut rng = stream_rng(seed, Purpose::Haar, index);
    let g = gaussian_matrix(&mut rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;
    use approx::assert_abs_diff_eq;

    fn fam(space: SpaceSpec, vs: &[&[f64]]) -> VectorFamily {
        VectorFamily::new(space, vs.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rademacher_examples() {
        for n in 1..=6 {
            let basis = VectorFamily::standard_basis(SpaceSpec::linf(n));
            assert_eq!(rademacher_moment(&basis, 2.0).unwrap(), 1.0);
        }
        let f = fam(SpaceSpec::l2(2), &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_abs_diff_eq!(rademacher_moment(&f, 2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        // |±1±1| over four patterns averages (2+0+0+2)/4
        let f = fam(SpaceSpec::l1(1), &[&[1.0], &[1.0]]);
        assert_eq!(rademacher_moment(&f, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rademacher_rejects_bad_inputs() {
        let f = fam(SpaceSpec::l1(1), &[&[1.0]]);
        assert!(rademacher_moment(&f, 0.5).is_err());
        let big = VectorFamily::new(SpaceSpec::l1(1), vec![vec![1.0]; 21]).unwrap();
        assert!(matches!(rademacher_moment(&big, 2.0), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn gaussian_exact_paths() {
        let plan = RandomPlan::default();
        let e = gaussian_moment(&VectorFamily::standard_basis(SpaceSpec::l2(5)), &plan).unwrap();
        assert!(e.is_exact());
        assert_abs_diff_eq!(e.value, 5f64.sqrt(), epsilon = 1e-15);
        let e = gaussian_moment(&fam(SpaceSpec::l1(1), &[&[1.0]]), &plan).unwrap();
        assert_eq!(e.kind, crate::EstimateKind::MonteCarlo);
        assert!((e.value - 1.0).abs() < 4.0 * e.stderr + 1e-3);
    }

    #[test]
    fn gaussian_l1_first_moment() {
        let plan = RandomPlan::default().with_moment(1.0);
        let e = gaussian_moment(&VectorFamily::standard_basis(SpaceSpec::l1(2)), &plan).unwrap();
        let expected = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((e.value - expected).abs() <= 3.0 * e.stderr, "{e} vs {expected}");
        assert!(e.stderr > 0.0 && e.stderr < 0.01);
    }

    #[test]
    fn gaussian_is_deterministic() {
        let plan = RandomPlan::new(9, 5000, 3.0).unwrap();
        let f = fam(SpaceSpec::linf(3), &[&[1.0, 2.0, 0.0], &[0.5, -1.0, 1.0]]);
        let a = gaussian_moment(&f, &plan).unwrap();
        let b = gaussian_moment(&f, &plan).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn khintchine_examples() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let r = khintchine_ratio(&[1.0], p).unwrap();
            assert_abs_diff_eq!(r.ratio, 1.0, epsilon = 1e-15);
            assert!(r.holds);
        }
        let r = khintchine_ratio(&[1.0, 1.0], 1.0).unwrap();
        assert_abs_diff_eq!(r.ratio, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(r.forced, ForcedBound::AtMostOne);
        assert!(r.holds);
        let r = khintchine_ratio(&[1.0, 1.0], 2.0).unwrap();
        assert_abs_diff_eq!(r.ratio, 1.0, epsilon = 1e-15);
        assert!(khintchine_ratio(&[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn kahane_examples() {
        let single = fam(SpaceSpec::new(2, Exponent::new(3.0).unwrap()).unwrap(), &[&[1.0, -2.0]]);
        assert_abs_diff_eq!(kahane_ratio(&single, 1.0, 4.0).unwrap(), 1.0, epsilon = 1e-14);
        let basis = VectorFamily::standard_basis(SpaceSpec::l2(2));
        assert_abs_diff_eq!(kahane_ratio(&basis, 2.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        let basis = VectorFamily::standard_basis(SpaceSpec::linf(2));
        assert_abs_diff_eq!(kahane_ratio(&basis, 1.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kahane_gaussian_singleton_is_moment_ratio() {
        // single standard Gaussian: (E|γ|²)^{1/2} / E|γ| = 1/m₁
        let plan = RandomPlan::new(3, 100_000, 2.0).unwrap();
        let e = kahane_ratio_gaussian(&fam(SpaceSpec::l2(1), &[&[1.0]]), 1.0, 2.0, &plan).unwrap();
        assert!((e.value - 1.0 / M1).abs() <= 4.0 * e.stderr, "{e}");
    }

    #[test]
    fn haar_is_orthogonal() {
        let plan = RandomPlan::default();
        let q1 = haar_orthogonal(1, &plan).unwrap();
        assert_eq!(q1[(0, 0)].abs(), 1.0);
        let q = haar_orthogonal(3, &plan).unwrap();
        let err = crate::linalg::frobenius(&(q.transpose() * &q - DMatrix::identity(3, 3)));
        assert!(err <= 1e-10);
        assert!(haar_orthogonal(0, &plan).is_err());
    }

    #[test]
    fn haar_entry_mean_is_zero() {
        let draws = 10_000;
        let xs: Vec<f64> = (0..draws).map(|i| haar_sample(3, 11, i).unwrap()[(0, 0)]).collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!(mean.abs() <= 4.0 * se, "mean {mean} se {se}");
    }
}
