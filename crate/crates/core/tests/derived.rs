//! Worked examples checked against brute-force oracles written independently of the library.

use nalgebra::DMatrix;
use summa_core::grothendieck::norm_inf_to_1;
use summa_core::ideals::{extreme_dual_points, gamma_norm_hilbert_domain, pi_2_upper, pi_p_lower, pietsch_factorize, weak_star_nuclear_rep};
use summa_core::linalg::svd_matrix;
use summa_core::opnorm::op_norm;
use summa_core::randsums::{gaussian_moment, kahane_ratio, khintchine_ratio, rademacher_moment};
use summa_core::seq::{sign_sup_norm, weak_lp_norm, VectorFamily};
use summa_core::witness::WitnessBudget;
use summa_core::{Exponent, Operator, RandomPlan, SpaceSpec};

/// Every `t ∈ {±1}^n`, both signs of the first coordinate included.
fn all_signs(n: usize) -> Vec<Vec<f64>> {
    (0..1u32 << n).map(|b| (0..n).map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
}

fn lp(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn fam(space: SpaceSpec, vs: &[&[f64]]) -> VectorFamily {
    VectorFamily::new(space, vs.iter().map(|v| v.to_vec()).collect()).unwrap()
}

#[test]
fn hadamard_singular_values_from_gram() {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let gram = a.transpose() * &a;
    assert_eq!(gram, DMatrix::identity(2, 2) * 2.0);
    for s in svd_matrix(&a).singular_values.iter() {
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn inf_to_one_of_hadamard_by_full_enumeration() {
    let a = [[1.0, 1.0], [1.0, -1.0]];
    let oracle = all_signs(2)
        .iter()
        .flat_map(|s| all_signs(2).into_iter().map(move |t| (s.clone(), t)))
        .map(|(s, t)| (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a[i][j] * s[i] * t[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    assert_eq!(norm_inf_to_1(&m).unwrap(), oracle);
    let u = Operator::new(m, Exponent::INF, Exponent::ONE).unwrap();
    let e = op_norm(&u).unwrap();
    assert!(e.is_exact());
    assert_eq!(e.value, oracle);
}

#[test]
fn spectral_norm_from_characteristic_polynomial() {
    // AᵀA = [[10, 14], [14, 20]]: λ² − 30λ + 4 = 0
    let lambda = (30.0 + (900.0f64 - 16.0).sqrt()) / 2.0;
    let u = Operator::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], Exponent::TWO, Exponent::TWO).unwrap();
    let e = op_norm(&u).unwrap();
    assert!(e.is_exact());
    assert!((e.value - lambda.sqrt()).abs() < 1e-12);
    assert!((e.value - 5.4650).abs() < 1e-4);
}

#[test]
fn weak_norms_by_dual_enumeration() {
    // ℓ_1^2 basis, p = 1: sup over the cube vertices of |x*_1| + |x*_2|
    let basis = VectorFamily::standard_basis(SpaceSpec::l1(2));
    let oracle = all_signs(2).iter().map(|x| x[0].abs() + x[1].abs()).fold(0.0, f64::max);
    let e = weak_lp_norm(&basis, Exponent::ONE).unwrap();
    assert!(e.is_exact());
    assert_eq!(e.value, oracle);
    assert_eq!(sign_sup_norm(&basis).unwrap(), all_signs(2).iter().map(|t| lp(t, 1.0)).fold(0.0, f64::max));

    // {e₁, e₁} in ℓ_2^2, p = 2: σ₁ of [e₁ e₁]
    let twice = fam(SpaceSpec::l2(2), &[&[1.0, 0.0], &[1.0, 0.0]]);
    let sigma = svd_matrix(&twice.matrix()).singular_values[0];
    let e = weak_lp_norm(&twice, Exponent::TWO).unwrap();
    assert!(e.is_exact());
    assert!((e.value - sigma).abs() < 1e-12 && (sigma - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn rademacher_averages_by_enumeration() {
    let ones = fam(SpaceSpec::l1(1), &[&[1.0], &[1.0]]);
    let oracle = all_signs(2).iter().map(|t| (t[0] + t[1]).abs()).sum::<f64>() / 4.0;
    assert_eq!(rademacher_moment(&ones, 1.0).unwrap(), oracle);
    assert_eq!(oracle, 1.0);

    let k = khintchine_ratio(&[1.0, 1.0], 1.0).unwrap();
    assert!((k.ratio - oracle / 2f64.sqrt()).abs() < 1e-15);

    let c0 = VectorFamily::standard_basis(SpaceSpec::linf(2));
    let norms: Vec<f64> = all_signs(2).iter().map(|t| lp(t, f64::INFINITY)).collect();
    let m1 = norms.iter().sum::<f64>() / 4.0;
    let m2 = (norms.iter().map(|v| v * v).sum::<f64>() / 4.0).sqrt();
    assert_eq!(kahane_ratio(&c0, 1.0, 2.0).unwrap(), m2 / m1);
}

#[test]
fn gaussian_first_moment_in_l1() {
    let basis = VectorFamily::standard_basis(SpaceSpec::l1(2));
    let plan = RandomPlan::new(42, 100_000, 1.0).unwrap();
    let e = gaussian_moment(&basis, &plan).unwrap();
    let oracle = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    assert!((e.value - oracle).abs() <= 3.0 * e.stderr, "{} vs {oracle} ± {}", e.value, e.stderr);
}

#[test]
fn gaussian_second_moment_of_l2_to_l1_identity() {
    // E(|γ₁| + |γ₂|)² = 2 E γ² + 2 (E|γ|)²
    let u = Operator::identity(2, Exponent::TWO, Exponent::ONE).unwrap();
    let e = gamma_norm_hilbert_domain(&u, &RandomPlan::default()).unwrap();
    let oracle = (2.0 + 2.0 * 2.0 / std::f64::consts::PI).sqrt();
    assert!((e.value - oracle).abs() <= 4.0 * e.stderr);
}

#[test]
fn uniform_certificate_for_linf_identity() {
    let u = Operator::identity(2, Exponent::INF, Exponent::TWO).unwrap();
    let points = extreme_dual_points(u.domain(), 20).unwrap().unwrap();
    let (est, cert) = pi_2_upper(&u, &points).unwrap();
    assert!((est.value - 2f64.sqrt()).abs() < 1e-6);
    // ‖x‖₂² = 2 · Σ_k ½ ⟨x, e_k⟩² on a grid of x
    for i in -5..=5 {
        for j in -5..=5 {
            let x = [i as f64 / 5.0, j as f64 / 5.0];
            let rhs: f64 = cert.points.iter().zip(&cert.weights).map(|(p, w)| w * (p[0] * x[0] + p[1] * x[1]).powi(2)).sum();
            assert!(x[0] * x[0] + x[1] * x[1] <= cert.constant.powi(2) * rhs + 1e-9);
        }
    }
    let fac = pietsch_factorize(&u, &cert).unwrap();
    assert!(fac.residual <= 1e-10);
    assert!((fac.u_hat_norm - 2f64.sqrt()).abs() < 1e-6);

    let lower = pi_p_lower(&u, 2.0, &WitnessBudget::default()).unwrap();
    assert!(lower.value >= 2f64.sqrt() - 1e-6);
}

#[test]
fn nuclear_weak_l1_by_cauchy_schwarz() {
    let u = Operator::diagonal(&[0.6, 0.8], Exponent::TWO, Exponent::TWO).unwrap();
    let rep = weak_star_nuclear_rep(&u).unwrap();
    // sup over the unit circle of 0.6|x₁| + 0.8|x₂|, on a fine grid
    let grid = (0..200_000)
        .map(|k| {
            let t = k as f64 / 200_000.0 * std::f64::consts::TAU;
            0.6 * t.cos().abs() + 0.8 * t.sin().abs()
        })
        .fold(0.0, f64::max);
    assert!((rep.weak_l1.value - 1.0).abs() < 1e-10);
    assert!(grid <= 1.0 + 1e-12 && grid > 1.0 - 1e-9);
}
