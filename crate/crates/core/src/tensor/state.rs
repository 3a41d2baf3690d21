use num_complex::Complex;

use super::{kron, modulus, real, vec_norm, CVector, Dims};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Unit vector in one tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorState<T: Real> {
    amps: CVector<T>,
}

impl<T: Real> FactorState<T> {
    /// Checks the unit-norm invariant; phase is left untouched.
    pub fn new(amps: CVector<T>) -> Result<Self> {
        let n = vec_norm(&amps);
        if amps.is_empty() || (n - T::one()).abs() > T::unit_tolerance() {
            return Err(Error::NotUnit(n.as_f64()));
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps`. Fails on the zero vector.
    pub fn normalized(amps: CVector<T>) -> Result<Self> {
        let n = vec_norm(&amps);
        if amps.is_empty() || n <= T::default_epsilon() {
            return Err(Error::NotUnit(n.as_f64()));
        }
        Ok(Self {
            amps: amps.unscale(n),
        })
    }

    /// Standard basis vector `e_k` of `C^d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(d);
        amps[k] = real(T::one());
        Self { amps }
    }

    pub(crate) fn from_unit_unchecked(amps: CVector<T>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amps
    }

    /// Multiplies by a scalar, which should have unit modulus.
    pub fn scaled(&self, lambda: Complex<T>) -> Self {
        Self {
            amps: &self.amps * lambda,
        }
    }

    /// Same ray with the largest-modulus amplitude made real nonnegative.
    pub fn phase_normalized(&self) -> Self {
        let mut amps = self.amps.clone();
        apply_canonical_phase(&mut amps);
        Self { amps }
    }

    /// Bloch vector `(p_x, p_y, p_z)` of a qubit state.
    pub fn bloch(&self) -> Result<[T; 3]> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let (a0, a1) = (self.amps[0], self.amps[1]);
        let cross = a0.conj() * a1;
        let two: T = lit(2.0);
        Ok([two * cross.re, two * cross.im, a0.norm_sqr() - a1.norm_sqr()])
    }
}

/// Unit scalar that makes the largest-modulus entry of `v` real and
/// nonnegative. Entries within a relative 1e-9 of the maximum count as
/// ties, resolved by lowest index.
pub fn canonical_phase<T: Real>(v: &CVector<T>) -> Complex<T> {
    let max = v.iter().map(|z| modulus(*z)).fold(T::zero(), |a, b| a.max(b));
    if max <= T::zero() {
        return real(T::one());
    }
    let pivot = v[pivot_index(v, max)];
    let m = modulus(pivot);
    Complex::new(pivot.re / m, -pivot.im / m)
}

fn pivot_index<T: Real>(v: &CVector<T>, max: T) -> usize {
    let cut = max * (T::one() - lit(1e-9));
    v.iter().position(|z| modulus(*z) >= cut).unwrap()
}

/// Applies [`canonical_phase`] in place and returns it. The pivot entry is
/// set to its exact modulus, so applying it twice changes nothing.
fn apply_canonical_phase<T: Real>(v: &mut CVector<T>) -> Complex<T> {
    let max = v.iter().map(|z| modulus(*z)).fold(T::zero(), |a, b| a.max(b));
    if max <= T::zero() {
        return real(T::one());
    }
    let k = pivot_index(v, max);
    let m = modulus(v[k]);
    let lambda = Complex::new(v[k].re / m, -v[k].im / m);
    if lambda != real(T::one()) {
        *v *= lambda;
        v[k] = real(m);
    }
    lambda
}

/// `â`: the unit qubit orthogonal to `a`, `(−conj a_1, conj a_0)` with the
/// phase convention applied.
pub fn qubit_hat<T: Real>(a: &FactorState<T>) -> Result<FactorState<T>> {
    if a.dim() != 2 {
        return Err(Error::NotQubit(a.dim()));
    }
    let amps = CVector::from_vec(vec![-a.amps[1].conj(), a.amps[0].conj()]);
    Ok(FactorState::from_unit_unchecked(amps).phase_normalized())
}

/// `a_1 ⊗ … ⊗ a_n`.
///
/// Factors `2..n` are kept phase-normalized; whatever phase they carried is
/// moved onto factor 1, so the expanded vector is exactly the product of
/// the factors passed in.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState<T: Real> {
    dims: Dims,
    factors: Vec<FactorState<T>>,
}

impl<T: Real> ProductState<T> {
    /// Panics if `factors` is empty.
    pub fn new(mut factors: Vec<FactorState<T>>) -> Self {
        assert!(!factors.is_empty(), "product state with no factors");
        let mut carried = real(T::one());
        for f in factors.iter_mut().skip(1) {
            let lambda = apply_canonical_phase(&mut f.amps);
            carried *= lambda.conj();
        }
        if carried != real(T::one()) {
            factors[0].amps *= carried;
        }
        let dims = Dims {
            total: factors.iter().map(FactorState::dim).product(),
            factors: factors.iter().map(FactorState::dim).collect(),
        };
        Self { dims, factors }
    }

    /// As [`ProductState::new`], checking the factor dimensions against `dims`.
    pub fn with_dims(dims: &Dims, factors: Vec<FactorState<T>>) -> Result<Self> {
        let found: Vec<usize> = factors.iter().map(FactorState::dim).collect();
        if found.as_slice() != dims.factors() {
            return Err(Error::DimensionMismatch {
                expected: dims.to_string(),
                found: format!("{found:?}"),
            });
        }
        Ok(Self::new(factors))
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn factors(&self) -> &[FactorState<T>] {
        &self.factors
    }

    pub fn factor(&self, j: usize) -> &FactorState<T> {
        &self.factors[j]
    }

    pub fn expand(&self) -> CVector<T> {
        let vs: Vec<CVector<T>> = self.factors.iter().map(|f| f.amps.clone()).collect();
        kron(&vs)
    }

    /// Same ray with the global phase removed.
    pub fn canonical(&self) -> Self {
        let mut factors = self.factors.clone();
        factors[0] = factors[0].phase_normalized();
        Self {
            dims: self.dims.clone(),
            factors,
        }
    }

    /// Multiplies the state (via factor 1) by `lambda`.
    pub fn with_phase(&self, lambda: Complex<T>) -> Self {
        let mut out = self.clone();
        out.factors[0].amps *= lambda;
        out
    }

    /// Scales factor `j` alone by `lambda`, bypassing the phase convention.
    /// Used to probe phase invariance of oracles.
    pub fn with_factor_scaled(&self, j: usize, lambda: Complex<T>) -> Self {
        let mut out = self.clone();
        out.factors[j].amps *= lambda;
        out
    }

    /// Factors `2..n` as a product state, if there are any.
    pub fn tail(&self) -> Option<Self> {
        (self.factors.len() > 1).then(|| Self::new(self.factors[1..].to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::tensor::overlap;

    type F = FactorState<f64>;

    #[test]
    fn factor_state_rejects_non_unit() {
        let v = CVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]);
        assert!(matches!(F::new(v.clone()), Err(Error::NotUnit(_))));
        assert!(F::normalized(v).is_ok());
        assert!(F::normalized(CVector::zeros(3)).is_err());
    }

    #[test]
    fn hat_of_e0_is_e1() {
        let h = qubit_hat(&F::basis(2, 0)).unwrap();
        assert_eq!(h, F::basis(2, 1));
    }

    #[test]
    fn hat_of_plus_is_minus_up_to_phase() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = F::new(CVector::from_vec(vec![Complex::new(s, 0.0), Complex::new(s, 0.0)])).unwrap();
        let minus = CVector::from_vec(vec![Complex::new(s, 0.0), Complex::new(-s, 0.0)]);
        let h = qubit_hat(&plus).unwrap();
        assert!((overlap(h.amplitudes(), &minus).unwrap().norm() - 1.0).abs() < 1e-15);
        // convention: tie between equal moduli resolved at index 0
        assert!((h.amplitudes()[0] - Complex::new(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hat_requires_qubit() {
        assert!(matches!(qubit_hat(&F::basis(3, 0)), Err(Error::NotQubit(3))));
    }

    #[test]
    fn hat_is_orthogonal_and_an_involution_up_to_phase() {
        let mut rng = random::rng(5);
        for _ in 0..1000 {
            let a: F = random::random_factor_state(2, &mut rng);
            let h = qubit_hat(&a).unwrap();
            assert!(overlap(a.amplitudes(), h.amplitudes()).unwrap().norm() < 1e-12);
            assert!((vec_norm(h.amplitudes()) - 1.0).abs() < 1e-12);
            let hh = qubit_hat(&h).unwrap();
            assert!((overlap(a.amplitudes(), hh.amplitudes()).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_keeps_expansion_and_normalizes_tail_phases() {
        let mut rng = random::rng(9);
        let raw: Vec<F> = [3, 2, 3]
            .iter()
            .map(|&d| random::random_factor_state(d, &mut rng))
            .collect();
        let vs: Vec<_> = raw.iter().map(|f| f.amplitudes().clone()).collect();
        let p = ProductState::new(raw);
        assert!(vec_norm(&(p.expand() - kron(&vs))) < 1e-14);
        for f in &p.factors()[1..] {
            let max = f.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = f.amplitudes().iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re >= 0.0);
        }
    }

    #[test]
    fn bloch_vectors_of_hat_are_antipodal() {
        let mut rng = random::rng(12);
        for _ in 0..100 {
            let a: F = random::random_factor_state(2, &mut rng);
            let p = a.bloch().unwrap();
            let q = qubit_hat(&a).unwrap().bloch().unwrap();
            for k in 0..3 {
                assert!((p[k] + q[k]).abs() < 1e-12);
            }
            assert!((p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
