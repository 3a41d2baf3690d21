//! Finite-dimensional tensor-product linear algebra.
//!
//! Multi-indices are flattened lexicographically with factor 1 slowest, so
//! `e_i ⊗ e_j` in dims `(d1, d2)` sits at `i * d2 + j`. Every module shares
//! this ordering.

mod operator;
mod state;
mod subspace;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use operator::HermitianOp;
pub use state::{canonical_phase, qubit_hat, FactorState, ProductState};
pub use subspace::{
    complement_basis, kernel_basis, null_space, numerical_rank, orthonormal_report,
    OrthonormalReport, Subspace, DEFAULT_ORTHO_TOL, DEFAULT_RANK_TOL,
};

pub type CVector<T> = DVector<Complex<T>>;
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Ordered factor dimensions of `H_1 ⊗ … ⊗ H_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dims {
    factors: Vec<usize>,
    total: usize,
}

impl Dims {
    /// Every factor must have dimension at least 2.
    pub fn new(factors: impl Into<Vec<usize>>) -> Result<Self> {
        let factors = factors.into();
        if factors.is_empty() {
            return Err(Error::InvalidDims("no factors".into()));
        }
        if let Some(d) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "factor dimension {d} < 2 in {factors:?}"
            )));
        }
        Ok(Self::from_factors(factors))
    }

    /// `C^2 ⊗ C^n` for `n >= 1`. The second factor may be one-dimensional,
    /// which the qubit block machinery needs for `n = 1`.
    pub fn qubit_pair(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDims("qubit pair with n = 0".into()));
        }
        Ok(Self::from_factors(vec![2, n]))
    }

    fn from_factors(factors: Vec<usize>) -> Self {
        let total = factors.iter().product();
        Self { factors, total }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of tensor factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Dimensions of factors `2..n`, if there are any.
    pub fn tail(&self) -> Option<Dims> {
        (self.factors.len() > 1).then(|| Self::from_factors(self.factors[1..].to_vec()))
    }

    /// Prepends a factor.
    pub fn with_leading(&self, d: usize) -> Dims {
        let mut f = Vec::with_capacity(self.factors.len() + 1);
        f.push(d);
        f.extend_from_slice(&self.factors);
        Self::from_factors(f)
    }

    /// Complex dimension of the cone of product tensors, `Σ(d_j − 1) + 1`.
    pub fn segre_dim(&self) -> usize {
        self.factors.iter().map(|d| d - 1).sum::<usize>() + 1
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.factors.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.factors).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Sum of the per-factor indices of a flat index (its total degree).
    pub fn degree(&self, flat: usize) -> usize {
        self.multi_index(flat).iter().sum()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Dims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidDims(format!("cannot parse {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dims::new(factors)
    }
}

/// Kronecker product of factor vectors, factor 1 slowest. No normalization.
pub fn kron<T: Real>(factors: &[CVector<T>]) -> CVector<T> {
    let mut out = CVector::<T>::from_element(1, Complex::new(T::one(), T::zero()));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Expands `a_1 ⊗ … ⊗ a_n` into a vector of length `dims.total()`.
pub fn tensor_expand<T: Real>(p: &ProductState<T>, dims: &Dims) -> Result<CVector<T>> {
    if p.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims.to_string(),
            found: p.dims().to_string(),
        });
    }
    Ok(p.expand())
}

/// Hermitian inner product, conjugate-linear in `x`.
pub fn overlap<T: Real>(x: &CVector<T>, y: &CVector<T>) -> Result<Complex<T>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.dotc(y))
}

pub(crate) fn modulus<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

pub(crate) fn vec_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub(crate) fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Frobenius norm of a complex matrix.
pub(crate) fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}
