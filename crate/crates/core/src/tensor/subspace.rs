use super::{frobenius, modulus, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Default orthonormality tolerance.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Outcome of an orthonormality check.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalReport<T: Real> {
    pub count: usize,
    pub ambient: usize,
    /// `max |⟨v_i|v_j⟩ − δ_ij|`; infinite when the vectors differ in length.
    pub max_deviation: T,
    pub pass: bool,
}

/// Checks `max |⟨v_i|v_j⟩ − δ_ij| <= tol`, and with `require_basis` also
/// that there are as many vectors as the ambient dimension.
pub fn orthonormal_report<T: Real>(
    vectors: &[CVector<T>],
    tol: T,
    require_basis: bool,
) -> OrthonormalReport<T> {
    let ambient = vectors.first().map_or(0, |v| v.len());
    if vectors.iter().any(|v| v.len() != ambient) {
        return OrthonormalReport {
            count: vectors.len(),
            ambient,
            max_deviation: T::max_value().unwrap(),
            pass: false,
        };
    }
    let mut dev = T::zero();
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate().skip(i) {
            let mut g = vi.dotc(vj);
            if i == j {
                g.re -= T::one();
            }
            dev = dev.max(modulus(g));
        }
    }
    let pass = dev <= tol && (!require_basis || vectors.len() == ambient);
    OrthonormalReport {
        count: vectors.len(),
        ambient,
        max_deviation: dev,
        pass,
    }
}

/// Subspace of `C^ambient` carried by an orthonormal set of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    ambient: usize,
    basis: CMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Accepts `columns` if they are orthonormal within 1e-10.
    pub fn new(ambient: usize, columns: &[CVector<T>]) -> Result<Self> {
        if let Some(v) = columns.iter().find(|v| v.len() != ambient) {
            return Err(Error::LengthMismatch(ambient, v.len()));
        }
        let report = orthonormal_report(columns, lit(DEFAULT_ORTHO_TOL), false);
        if !report.pass {
            return Err(Error::NotOrthonormal(report.max_deviation.as_f64()));
        }
        Ok(Self::from_basis_unchecked(ambient, columns))
    }

    pub(crate) fn from_basis_unchecked(ambient: usize, columns: &[CVector<T>]) -> Self {
        let basis = if columns.is_empty() {
            CMatrix::zeros(ambient, 0)
        } else {
            CMatrix::from_columns(columns)
        };
        Self { ambient, basis }
    }

    pub(crate) fn from_matrix_unchecked(basis: CMatrix<T>) -> Self {
        Self {
            ambient: basis.nrows(),
            basis,
        }
    }

    /// Orthonormal basis of the span of `vectors` (rank decided at 1e-10
    /// relative to the largest singular value).
    pub fn span(ambient: usize, vectors: &[CVector<T>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::LengthMismatch(ambient, v.len()));
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let m = CMatrix::from_columns(vectors);
        let svd = m.svd(true, false);
        let u = svd.u.unwrap();
        let smax = svd
            .singular_values
            .iter()
            .fold(T::zero(), |a, &b| a.max(b));
        let cut = smax * lit(DEFAULT_RANK_TOL);
        let cols: Vec<CVector<T>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > cut && smax > T::zero())
            .map(|(k, _)| u.column(k).into_owned())
            .collect();
        Ok(Self::from_basis_unchecked(ambient, &cols))
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: CMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: CMatrix::identity(ambient, ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `ambient × dim` matrix of orthonormal columns.
    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn columns(&self) -> Vec<CVector<T>> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// `P = Σ c cᴴ`.
    pub fn projector(&self) -> CMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    /// Frobenius distance between the two projectors.
    pub fn projector_distance(&self, other: &Self) -> T {
        frobenius(&(self.projector() - other.projector()))
    }

    pub fn project(&self, v: &CVector<T>) -> CVector<T> {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// Applies a linear map to every column. The map should be unitary for
    /// the result to stay orthonormal.
    pub fn transformed(&self, u: &CMatrix<T>) -> Self {
        Self::from_matrix_unchecked(u * &self.basis)
    }
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numerical_rank<T: Real>(m: &CMatrix<T>, rel_tol: T) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    if smax <= T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > smax * rel_tol).count()
}

/// Orthonormal basis (as columns) of `{x : rows · x = 0}`.
pub fn null_space<T: Real>(rows: &CMatrix<T>, rel_tol: T) -> CMatrix<T> {
    let n = rows.ncols();
    if rows.nrows() == 0 {
        return CMatrix::identity(n, n);
    }
    // pad to square so the SVD returns a full right-singular basis
    let square = if rows.nrows() < n {
        let mut padded = CMatrix::zeros(n, n);
        padded.rows_mut(0, rows.nrows()).copy_from(rows);
        padded
    } else {
        rows.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let smax = svd
        .singular_values
        .iter()
        .fold(T::zero(), |a, &b| a.max(b));
    if smax <= T::zero() {
        return CMatrix::identity(n, n);
    }
    let cols: Vec<CVector<T>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= smax * rel_tol)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Orthogonal complement of `s` in its ambient space.
pub fn complement_basis<T: Real>(s: &Subspace<T>) -> Subspace<T> {
    if s.dim() == 0 {
        return Subspace::full(s.ambient());
    }
    Subspace::from_matrix_unchecked(null_space(&s.basis.adjoint(), lit(DEFAULT_RANK_TOL)))
}

/// Joint kernel of linear functionals `x ↦ Σ_i λ_i x_i`.
pub fn kernel_basis<T: Real>(functionals: &[CVector<T>], ambient: usize) -> Result<Subspace<T>> {
    if let Some(f) = functionals.iter().find(|f| f.len() != ambient) {
        return Err(Error::LengthMismatch(ambient, f.len()));
    }
    if functionals.is_empty() {
        return Ok(Subspace::full(ambient));
    }
    let rows = CMatrix::from_rows(
        &functionals
            .iter()
            .map(|f| f.transpose())
            .collect::<Vec<_>>(),
    );
    Ok(Subspace::from_matrix_unchecked(null_space(
        &rows,
        lit(DEFAULT_RANK_TOL),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use num_complex::Complex;

    fn e(n: usize, k: usize) -> CVector<f64> {
        let mut v = CVector::zeros(n);
        v[k] = Complex::new(1.0, 0.0);
        v
    }

    #[test]
    fn standard_basis_passes() {
        let vs: Vec<_> = (0..4).map(|k| e(4, k)).collect();
        let r = orthonormal_report(&vs, 1e-10, true);
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.pass);
        assert!(!orthonormal_report(&vs[..3], 1e-10, true).pass);
        assert!(orthonormal_report(&vs[..3], 1e-10, false).pass);
    }

    #[test]
    fn repeated_vector_fails() {
        let r = orthonormal_report(&[e(2, 0), e(2, 0)], 1e-10, false);
        assert_eq!(r.max_deviation, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn mismatched_lengths_fail() {
        assert!(!orthonormal_report(&[e(2, 0), e(3, 1)], 1e-10, false).pass);
    }

    #[test]
    fn haar_unitary_columns_pass() {
        let mut rng = random::rng(4);
        for n in 1..6 {
            let u = random::random_unitary::<f64, _>(n, &mut rng);
            let cols: Vec<_> = u.column_iter().map(|c| c.into_owned()).collect();
            assert!(orthonormal_report(&cols, 1e-10, true).pass);
        }
    }

    #[test]
    fn complement_of_e0() {
        let s = Subspace::new(3, &[e(3, 0)]).unwrap();
        let c = complement_basis(&s);
        assert_eq!(c.dim(), 2);
        for col in c.columns() {
            assert!(col[0].norm() < 1e-14);
        }
        assert_eq!(complement_basis(&Subspace::<f64>::full(4)).dim(), 0);
        assert_eq!(complement_basis(&Subspace::<f64>::zero(4)).dim(), 4);
    }

    #[test]
    fn complement_direct_sum_and_involution() {
        let mut rng = random::rng(8);
        for n in 2..7 {
            for k in 0..=n {
                let u = random::random_unitary::<f64, _>(n, &mut rng);
                let cols: Vec<_> = (0..k).map(|c| u.column(c).into_owned()).collect();
                let s = Subspace::new(n, &cols).unwrap();
                let c = complement_basis(&s);
                assert_eq!(c.dim(), n - k);
                let sum = s.projector() + c.projector();
                assert!(frobenius(&(sum - CMatrix::identity(n, n))) < 1e-10);
                assert!(complement_basis(&c).projector_distance(&s) < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_of_single_covector() {
        let k = kernel_basis(&[e(4, 0)], 4).unwrap();
        assert_eq!(k.dim(), 3);
        assert_eq!(kernel_basis(&[CVector::<f64>::zeros(4)], 4).unwrap().dim(), 4);
        assert!(kernel_basis(&[e(3, 0)], 4).is_err());
    }

    #[test]
    fn kernel_dimension_matches_singular_value_count() {
        let mut rng = random::rng(10);
        for n in 2..8 {
            for d in 0..=n {
                let fs: Vec<CVector<f64>> =
                    (0..d).map(|_| random::gaussian_vector(n, &mut rng)).collect();
                let k = kernel_basis(&fs, n).unwrap();
                // independent count: nonzero singular values of the stacked rows
                let rank = if d == 0 {
                    0
                } else {
                    let m = CMatrix::from_rows(&fs.iter().map(|f| f.transpose()).collect::<Vec<_>>());
                    let sv = m.singular_values();
                    let smax = sv.max();
                    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
                };
                assert_eq!(k.dim(), n - rank);
                assert_eq!(k.dim(), n - d);
                for col in k.columns() {
                    for f in &fs {
                        assert!((f.transpose() * &col)[0].norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn span_drops_dependent_vectors() {
        let a = e(3, 0);
        let b = e(3, 1);
        let mix = &a * Complex::new(0.3, 0.1) + &b * Complex::new(-1.0, 2.0);
        let s = Subspace::span(3, &[a, b, mix]).unwrap();
        assert_eq!(s.dim(), 2);
    }
}
