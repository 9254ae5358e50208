use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;

/// The finite-dimensional sequence space `ℓ_p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dim: usize,
    #[serde(rename = "p")]
    pub exp: Exponent,
}

impl SpaceSpec {
    pub fn new(dim: usize, exp: Exponent) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("space dimension must be positive".into()));
        }
        Ok(SpaceSpec { dim, exp })
    }

    pub fn l1(dim: usize) -> Self {
        SpaceSpec { dim: dim.max(1), exp: Exponent::ONE }
    }

    pub fn l2(dim: usize) -> Self {
        SpaceSpec { dim: dim.max(1), exp: Exponent::TWO }
    }

    pub fn linf(dim: usize) -> Self {
        SpaceSpec { dim: dim.max(1), exp: Exponent::INF }
    }

    pub fn dual(self) -> SpaceSpec {
        SpaceSpec { dim: self.dim, exp: self.exp.dual() }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        crate::linalg::p_norm(x, self.exp)
    }
}

/// A linear map `ℓ_p^n → ℓ_q^m` represented by an `m × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<f64>,
    domain: SpaceSpec,
    codomain: SpaceSpec,
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>, domain: Exponent, codomain: Exponent) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::Degenerate { rows, cols });
        }
        Ok(Operator {
            matrix,
            domain: SpaceSpec { dim: cols, exp: domain },
            codomain: SpaceSpec { dim: rows, exp: codomain },
        })
    }

    pub fn with_spaces(matrix: DMatrix<f64>, domain: SpaceSpec, codomain: SpaceSpec) -> Result<Self> {
        if matrix.ncols() != domain.dim || matrix.nrows() != codomain.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but spaces have dims {} -> {}",
                matrix.nrows(),
                matrix.ncols(),
                domain.dim,
                codomain.dim
            )));
        }
        Operator::new(matrix, domain.exp, codomain.exp)
    }

    /// Build from row slices; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>], domain: Exponent, codomain: Exponent) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let matrix = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Operator::new(matrix, domain, codomain)
    }

    pub fn identity(n: usize, domain: Exponent, codomain: Exponent) -> Result<Self> {
        Operator::new(DMatrix::identity(n, n), domain, codomain)
    }

    pub fn diagonal(diag: &[f64], domain: Exponent, codomain: Exponent) -> Result<Self> {
        let n = diag.len();
        Operator::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }), domain, codomain)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn domain(&self) -> SpaceSpec {
        self.domain
    }

    pub fn codomain(&self) -> SpaceSpec {
        self.codomain
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|&a| a == 0.0)
    }

    /// Same matrix viewed between different spaces.
    pub fn reinterpret(&self, domain: Exponent, codomain: Exponent) -> Operator {
        Operator {
            matrix: self.matrix.clone(),
            domain: SpaceSpec { dim: self.domain.dim, exp: domain },
            codomain: SpaceSpec { dim: self.codomain.dim, exp: codomain },
        }
    }

    /// `self ∘ inner`, i.e. apply `inner` first.
    pub fn compose(&self, inner: &Operator) -> Result<Operator> {
        if inner.codomain.dim != self.domain.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}-dim output with {}-dim input",
                inner.codomain.dim, self.domain.dim
            )));
        }
        Operator::new(&self.matrix * &inner.matrix, inner.domain.exp, self.codomain.exp)
    }
}
