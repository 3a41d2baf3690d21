//! Frame functions on product states, Born-operator reconstruction by
//! polarization, qubit-factor basis decomposition and entangled subspaces.
//!
//! All numerical code is generic over a real scalar type implementing
//! [`Real`] (`f32` and `f64`). The `*64` aliases below fix the scalar to
//! `f64`, which is what the command-line tool and the JSON layer use.

pub mod bases;
pub mod error;
pub mod frames;
pub mod json;
pub mod random;
pub mod reconstruct;
mod scalar;
pub mod subspaces;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::{lit, Real};
pub use tensor::Dims;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type UnentangledBasis64 = bases::UnentangledBasis<f64>;
pub type BasisBlockDecomposition64 = bases::BasisBlockDecomposition<f64>;
pub type BornOracle64 = frames::BornOracle<f64>;
pub type QubitFrameFn64 = frames::QubitFrameFn<f64>;
pub type CounterexampleOracle64 = frames::CounterexampleOracle<f64>;
pub type FactorState64 = tensor::FactorState<f64>;
pub type ProductState64 = tensor::ProductState<f64>;
pub type HermitianOp64 = tensor::HermitianOp<f64>;
pub type Subspace64 = tensor::Subspace<f64>;

pub type ProductState32 = tensor::ProductState<f32>;
pub type HermitianOp32 = tensor::HermitianOp<f32>;
pub type Subspace32 = tensor::Subspace<f32>;
pub type EntangledSubspaceCert64 = subspaces::EntangledSubspaceCert<f64>;
pub type SearchReport64 = subspaces::SearchReport<f64>;
