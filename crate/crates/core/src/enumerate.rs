//! Exhaustive sign enumeration in Gray-code order.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated sign bits (2^20 patterns).
pub const DEFAULT_ENUM_CAP: usize = 20;

const RESYNC_EVERY: u64 = 1024;

pub fn check_cap(bits: usize, cap: usize) -> Result<()> {
    if bits > cap {
        Err(Error::CapExceeded { bits, cap })
    } else {
        Ok(())
    }
}

/// Calls `visit(y, t)` with `y = Σ_j t_j a_j` for every `t ∈ {±1}^n` having `t_0 = +1`.
///
/// The objectives enumerated here are even in `t`, so fixing the first sign visits
/// every value exactly once per antipodal pair. `y` is updated incrementally and
/// resynchronised from scratch every 1024 steps to bound drift.
pub fn for_each_signed_sum<F>(a: &DMatrix<f64>, mut visit: F)
where
    F: FnMut(&[f64], &[f64]),
{
    let (m, n) = a.shape();
    if n == 0 {
        visit(&vec![0.0; m], &[]);
        return;
    }
    let data = a.as_slice();
    let cols: Vec<&[f64]> = (0..n).map(|j| &data[j * m..(j + 1) * m]).collect();
    let mut t = vec![1.0; n];
    let mut y = vec![0.0; m];
    let resync = |y: &mut [f64], t: &[f64]| {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (c, &s) in cols.iter().zip(t) {
            for (yi, ci) in y.iter_mut().zip(c.iter()) {
                *yi += s * ci;
            }
        }
    };
    resync(&mut y, &t);
    visit(&y, &t);
    let total: u64 = 1 << (n - 1);
    for step in 1..total {
        let bit = step.trailing_zeros() as usize + 1;
        t[bit] = -t[bit];
        if step % RESYNC_EVERY == 0 {
            resync(&mut y, &t);
        } else {
            let s = 2.0 * t[bit];
            for (yi, ci) in y.iter_mut().zip(cols[bit].iter()) {
                *yi += s * ci;
            }
        }
        visit(&y, &t);
    }
}

/// Maximum of an even objective over all signed sums; returns the value and a maximizing `t`.
/// Ties keep the first pattern visited.
pub fn max_over_signs<F>(a: &DMatrix<f64>, mut objective: F) -> (f64, Vec<f64>)
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = f64::NEG_INFINITY;
    let mut arg = Vec::new();
    for_each_signed_sum(a, |y, t| {
        let v = objective(y);
        if v > best {
            best = v;
            arg = t.to_vec();
        }
    });
    (best, arg)
}

/// Average of an even objective over all `2^n` sign patterns.
pub fn mean_over_signs<F>(a: &DMatrix<f64>, mut objective: F) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let mut sum = 0.0;
    let mut count = 0u64;
    for_each_signed_sum(a, |y, _| {
        sum += objective(y);
        count += 1;
    });
    sum / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_half_the_patterns_once_each() {
        let a = DMatrix::from_fn(4, 5, |i, j| ((i + 1) * (j + 2)) as f64);
        let mut seen = std::collections::BTreeSet::new();
        for_each_signed_sum(&a, |y, t| {
            assert_eq!(t[0], 1.0);
            let key: Vec<i8> = t.iter().map(|&s| s as i8).collect();
            assert!(seen.insert(key));
            for i in 0..4 {
                let direct: f64 = (0..5).map(|j| t[j] * a[(i, j)]).sum();
                assert!((direct - y[i]).abs() < 1e-12);
            }
        });
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn resync_keeps_long_runs_exact() {
        let a = DMatrix::from_fn(3, 14, |i, j| ((i * 7 + j * 3) as f64).sin() * 1e3);
        let mut worst: f64 = 0.0;
        for_each_signed_sum(&a, |y, t| {
            for i in 0..3 {
                let direct: f64 = (0..14).map(|j| t[j] * a[(i, j)]).sum();
                worst = worst.max((direct - y[i]).abs());
            }
        });
        assert!(worst < 1e-9, "drift {worst}");
    }

    #[test]
    fn empty_family_visits_zero() {
        let a = DMatrix::<f64>::zeros(2, 0);
        let mut calls = 0;
        for_each_signed_sum(&a, |y, t| {
            calls += 1;
            assert_eq!(y, &[0.0, 0.0]);
            assert!(t.is_empty());
        });
        assert_eq!(calls, 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(check_cap(20, DEFAULT_ENUM_CAP).is_ok());
        assert!(matches!(check_cap(21, 20), Err(Error::CapExceeded { bits: 21, cap: 20 })));
    }
}
