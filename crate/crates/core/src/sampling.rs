//! Seeded randomness. ChaCha8 streams keyed by `(seed, purpose, index)`; Gaussian
//! variates from `rand_distr::StandardNormal` (ziggurat). Every random quantity in
//! the crate is derived this way, so identical seeds give bit-identical results
//! regardless of thread count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::linalg::p_norm;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Monte Carlo block size; every block draws from its own stream.
pub const MC_BLOCK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPlan {
    pub seed: u64,
    pub samples: usize,
    pub moment_p: f64,
}

impl Default for RandomPlan {
    fn default() -> Self {
        RandomPlan { seed: DEFAULT_SEED, samples: DEFAULT_SAMPLES, moment_p: 2.0 }
    }
}

impl RandomPlan {
    pub fn new(seed: u64, samples: usize, moment_p: f64) -> Result<Self> {
        let plan = RandomPlan { seed, samples, moment_p };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::precondition("RandomPlan", "samples >= 1"));
        }
        if self.moment_p.is_nan() || self.moment_p < 1.0 || self.moment_p.is_infinite() {
            return Err(Error::precondition("RandomPlan", "finite moment_p >= 1"));
        }
        Ok(())
    }

    pub fn with_moment(self, moment_p: f64) -> Self {
        RandomPlan { moment_p, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        RandomPlan { seed, ..self }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        RandomPlan { samples, ..self }
    }
}

/// Purposes keep unrelated consumers of one seed on disjoint streams.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Purpose {
    MonteCarlo = 1,
    Multistart = 2,
    Witness = 3,
    Haar = 4,
    Contraction = 5,
    Instances = 6,
    Refine = 7,
}

pub fn stream_rng(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let key = seed ^ (purpose as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// `rows × cols` matrix of i.i.d. standard normals, filled row by row.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut k = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            primes.push(k);
        }
        k += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Quasi-Monte-Carlo net on the unit sphere of `ℓ_p^dim`: Halton points pushed through the
/// normal quantile function (a rotation-invariant direction field), then normalised in `p`.
pub fn sphere_net(dim: usize, p: Exponent, size: usize) -> Vec<Vec<f64>> {
    let primes = first_primes(dim);
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(size);
    let mut i = 1u64;
    while out.len() < size {
        let mut x: Vec<f64> =
            primes.iter().map(|&b| normal.inverse_cdf(radical_inverse(i, b).clamp(1e-12, 1.0 - 1e-12))).collect();
        i += 1;
        let n = p_norm(&x, p);
        if n > 1e-12 {
            x.iter_mut().for_each(|v| *v /= n);
            out.push(x);
        }
    }
    out
}
