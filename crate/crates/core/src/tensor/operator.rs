use nalgebra::SymmetricEigen;
use num_complex::Complex;

use super::{frobenius, real, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Hermitian operator on `C^dim`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOp<T> {
    /// Accepts `matrix` if it is square and `m[r][s] = conj(m[s][r])` to
    /// within 1e-12 (or the scalar's unit tolerance, if coarser).
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::unit_tolerance())
    }

    pub fn with_tolerance(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = max_asymmetry(&matrix);
        if dev > tol {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        Ok(Self { matrix })
    }

    /// `(m + mᴴ)/2`, together with the Frobenius norm of `(m − mᴴ)/2`.
    pub fn hermitize(matrix: &CMatrix<T>) -> (Self, T) {
        let adj = matrix.adjoint();
        let half: T = lit(0.5);
        let anti = (matrix - &adj) * real(half);
        let sym = (matrix + adj) * real(half);
        (Self { matrix: sym }, frobenius(&anti))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
        }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &CVector<T>) -> Self {
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// `⟨x|T|x⟩` (real part; the imaginary part vanishes for Hermitian T).
    pub fn expectation(&self, x: &CVector<T>) -> T {
        x.dotc(&(&self.matrix * x)).re
    }

    pub fn trace(&self) -> T {
        self.matrix.diagonal().iter().fold(T::zero(), |acc, z| acc + z.re)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            matrix: &self.matrix * real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut ev: Vec<T> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_entry_distance(&self, other: &Self) -> T {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm_sqr().sqrt())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `Uᴴ T U`.
    pub fn conjugated_by(&self, u: &CMatrix<T>) -> Self {
        let (op, _) = Self::hermitize(&(u.adjoint() * &self.matrix * u));
        op
    }

    pub fn entry(&self, r: usize, s: usize) -> Complex<T> {
        self.matrix[(r, s)]
    }
}

fn max_asymmetry<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut dev = T::zero();
    for r in 0..n {
        for s in r..n {
            let d = m[(r, s)] - m[(s, r)].conj();
            dev = dev.max(d.norm_sqr().sqrt());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::tensor::FactorState;

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = Complex::new(0.0, 1.0);
        assert!(matches!(HermitianOp::new(m.clone()), Err(Error::NotHermitian(_))));
        m[(1, 0)] = Complex::new(0.0, -1.0);
        assert!(HermitianOp::new(m).is_ok());
        assert!(HermitianOp::new(CMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn expectation_and_trace() {
        let mut rng = random::rng(1);
        let t: HermitianOp<f64> = random::random_hermitian(4, &mut rng);
        let mut direct = 0.0;
        for k in 0..4 {
            direct += t.expectation(FactorState::basis(4, k).amplitudes());
        }
        assert!((direct - t.trace()).abs() < 1e-12);
    }

    #[test]
    fn hermitize_reports_asymmetry() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        let (h, asym) = HermitianOp::hermitize(&m);
        assert!((h.entry(0, 1).re - 0.5).abs() < 1e-15);
        assert!((h.entry(1, 0).re - 0.5).abs() < 1e-15);
        assert!((asym - (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn psd_has_nonnegative_spectrum() {
        let mut rng = random::rng(2);
        let t: HermitianOp<f64> = random::random_psd(5, &mut rng);
        assert!(t.min_eigenvalue() > -1e-12);
    }
}
