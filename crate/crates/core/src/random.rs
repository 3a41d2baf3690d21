//! Seeded randomness. Every generator in the crate draws from ChaCha20
//! seeded with `seed_from_u64`; independent sub-streams are addressed by
//! index so parallel work stays reproducible.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::scalar::{lit, Real};
use crate::tensor::{modulus, CMatrix, CVector, Dims, FactorState, HermitianOp, ProductState};

pub type SeededRng = ChaCha20Rng;

/// Name recorded in reports for replay.
pub const RNG_NAME: &str = "ChaCha20";

pub fn rng(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator for `seed`.
pub fn rng_stream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    lit(rng.sample::<f64, _>(StandardNormal))
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(
        lit(rng.sample::<f64, _>(StandardNormal) * s),
        lit(rng.sample::<f64, _>(StandardNormal) * s),
    )
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector<T> {
    CVector::from_fn(n, |_, _| gaussian_complex(rng))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(r: usize, c: usize, rng: &mut R) -> CMatrix<T> {
    DMatrix::from_fn(r, c, |_, _| gaussian_complex(rng))
}

pub fn random_phase<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex::new(lit(theta.cos()), lit(theta.sin()))
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let qr = gaussian_matrix::<T, R>(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let m = modulus(d);
        if m > T::zero() {
            let mut col = q.column_mut(k);
            col *= Complex::new(d.re / m, d.im / m);
        }
    }
    q
}

pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector<T> {
    loop {
        if let Ok(f) = FactorState::normalized(gaussian_vector(n, rng)) {
            return f.into_amplitudes();
        }
    }
}

pub fn random_factor_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> FactorState<T> {
    FactorState::from_unit_unchecked(random_unit_vector(d, rng))
}

pub fn random_product_state<T: Real, R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> ProductState<T> {
    ProductState::new(
        dims.factors()
            .iter()
            .map(|&d| random_factor_state(d, rng))
            .collect(),
    )
}

/// `(G + Gᴴ)/2` for complex Gaussian `G`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOp<T> {
    HermitianOp::hermitize(&gaussian_matrix(n, n, rng)).0
}

/// `G Gᴴ / n`.
pub fn random_psd<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOp<T> {
    let g = gaussian_matrix::<T, R>(n, n, rng);
    let scale: T = lit(1.0 / n as f64);
    HermitianOp::hermitize(&(&g * g.adjoint() * Complex::new(scale, T::zero()))).0
}

pub fn shuffle<X, R: Rng + ?Sized>(items: &mut [X], rng: &mut R) {
    items.shuffle(rng);
}
