//! Frame-function oracles on product states and Monte Carlo checks of the
//! weight condition `Σ_i f(v_i) = w` over sampled unentangled bases.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::bases::{BasisFamily, UnentangledBasis};
use crate::error::{Error, Result};
use crate::random::{self, rng, rng_stream};
use crate::scalar::{lit, Real};
use crate::tensor::{
    modulus, qubit_hat, real, CMatrix, CVector, Dims, FactorState, HermitianOp, ProductState,
    DEFAULT_ORTHO_TOL,
};

/// Real-valued function on the product states of `dims()` with a declared
/// frame weight.
pub trait FrameOracle<T: Real>: Send + Sync {
    fn dims(&self) -> &Dims;

    fn declared_weight(&self) -> T;

    /// Value at `p`, which must have dimensions `dims()`.
    fn eval(&self, p: &ProductState<T>) -> T;

    /// [`FrameOracle::eval`] with the dimensions checked.
    fn evaluate(&self, p: &ProductState<T>) -> Result<T> {
        if p.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims().to_string(),
                found: p.dims().to_string(),
            });
        }
        Ok(self.eval(p))
    }
}

impl<T: Real, O: FrameOracle<T> + ?Sized> FrameOracle<T> for Arc<O> {
    fn dims(&self) -> &Dims {
        (**self).dims()
    }
    fn declared_weight(&self) -> T {
        (**self).declared_weight()
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        (**self).eval(p)
    }
}

impl<T: Real, O: FrameOracle<T> + ?Sized> FrameOracle<T> for Box<O> {
    fn dims(&self) -> &Dims {
        (**self).dims()
    }
    fn declared_weight(&self) -> T {
        (**self).declared_weight()
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        (**self).eval(p)
    }
}

impl<T: Real, O: FrameOracle<T> + ?Sized> FrameOracle<T> for &O {
    fn dims(&self) -> &Dims {
        (**self).dims()
    }
    fn declared_weight(&self) -> T {
        (**self).declared_weight()
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        (**self).eval(p)
    }
}

/// `f(v) = ⟨v|T|v⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BornOracle<T: Real> {
    dims: Dims,
    op: HermitianOp<T>,
}

impl<T: Real> BornOracle<T> {
    pub fn operator(&self) -> &HermitianOp<T> {
        &self.op
    }
}

pub fn born_oracle<T: Real>(op: HermitianOp<T>, dims: &Dims) -> Result<BornOracle<T>> {
    if op.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: format!("operator on C^{}", dims.total()),
            found: format!("operator on C^{}", op.dim()),
        });
    }
    Ok(BornOracle {
        dims: dims.clone(),
        op,
    })
}

impl<T: Real> FrameOracle<T> for BornOracle<T> {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn declared_weight(&self) -> T {
        self.op.trace()
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        self.op.expectation(&p.expand())
    }
}

/// Odd function `ε` on the Bloch sphere, `ε(−p) = −ε(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OddPart<T: Real> {
    Zero,
    /// `c · p`.
    Linear([T; 3]),
    /// `c · p_z³`.
    CubicZ(T),
}

impl<T: Real> OddPart<T> {
    pub fn eval(&self, p: [T; 3]) -> T {
        match *self {
            OddPart::Zero => T::zero(),
            OddPart::Linear(c) => c[0] * p[0] + c[1] * p[1] + c[2] * p[2],
            OddPart::CubicZ(c) => c * p[2] * p[2] * p[2],
        }
    }
}

/// Qubit frame function `g(a) = w/2 + ε(bloch(a))`.
///
/// Antipodal Bloch vectors are orthogonal states, so `g(a) + g(â) = w` for
/// every odd `ε`; only linear `ε` give Born functions.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitFrameFn<T: Real> {
    dims: Dims,
    weight: T,
    odd: OddPart<T>,
}

impl<T: Real> QubitFrameFn<T> {
    pub fn new(weight: T, odd: OddPart<T>) -> Self {
        Self {
            dims: Dims::new(vec![2]).unwrap(),
            weight,
            odd,
        }
    }

    /// Weight `w` with `ε = 0.3 p_z³`.
    pub fn cubic(weight: T) -> Self {
        Self::new(weight, OddPart::CubicZ(lit(0.3)))
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn odd_part(&self) -> &OddPart<T> {
        &self.odd
    }

    fn value(&self, a: &FactorState<T>) -> T {
        let half: T = lit(0.5);
        self.weight * half + self.odd.eval(a.bloch().expect("qubit"))
    }
}

/// `g(a) = w/2 + ε(p)` with `p` the Bloch vector of `a`.
pub fn qubit_frame_eval<T: Real>(g: &QubitFrameFn<T>, a: &FactorState<T>) -> Result<T> {
    if a.dim() != 2 {
        return Err(Error::NotQubit(a.dim()));
    }
    Ok(g.value(a))
}

impl<T: Real> FrameOracle<T> for QubitFrameFn<T> {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn declared_weight(&self) -> T {
        self.weight
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        self.value(p.factor(0))
    }
}

/// `f(a ⊗ u) = g(a) · h(u)` over `C^2 ⊗ (H_2 ⊗ … ⊗ H_n)`.
#[derive(Clone)]
pub struct ProductFrameOracle<T: Real> {
    dims: Dims,
    g: QubitFrameFn<T>,
    h: Arc<dyn FrameOracle<T>>,
}

impl<T: Real> std::fmt::Debug for ProductFrameOracle<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductFrameOracle")
            .field("dims", &self.dims)
            .field("g", &self.g)
            .finish_non_exhaustive()
    }
}

/// Combines a qubit frame function with an oracle over the remaining
/// factors. The declared weight is `w_g · w_h`.
pub fn product_frame_oracle<T: Real>(
    g: QubitFrameFn<T>,
    h: Arc<dyn FrameOracle<T>>,
) -> ProductFrameOracle<T> {
    ProductFrameOracle {
        dims: h.dims().with_leading(2),
        g,
        h,
    }
}

impl<T: Real> ProductFrameOracle<T> {
    pub fn qubit_part(&self) -> &QubitFrameFn<T> {
        &self.g
    }
    pub fn rest(&self) -> &Arc<dyn FrameOracle<T>> {
        &self.h
    }
}

impl<T: Real> FrameOracle<T> for ProductFrameOracle<T> {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn declared_weight(&self) -> T {
        self.g.weight * self.h.declared_weight()
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        self.g.value(p.factor(0)) * self.h.eval(&p.tail().expect("at least two factors"))
    }
}

/// Choice of the ray map `u ↦ ψ(u)` behind a [`CounterexampleOracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMap {
    /// `ψ(u)_i = conj(u_i) |u_i|`, padded/truncated to `d2`, normalized.
    ModulusWeightedConjugate,
    /// `ψ(u) = conj(u)` padded/truncated to `d2`, normalized. For `d1 <= d2`
    /// the resulting oracle is a Born form.
    ConjugateEmbedding,
    /// `φ(u) = (w0/d2) I` for every `u`; a Born form.
    Constant,
    /// `ψ(u) = M conj(u)` normalized, with a seeded Gaussian `d2 × d1` matrix `M`.
    Random,
}

impl PsiMap {
    pub fn name(self) -> &'static str {
        match self {
            PsiMap::ModulusWeightedConjugate => "modulus-weighted-conjugate",
            PsiMap::ConjugateEmbedding => "conjugate-embedding",
            PsiMap::Constant => "constant",
            PsiMap::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            PsiMap::ModulusWeightedConjugate,
            PsiMap::ConjugateEmbedding,
            PsiMap::Constant,
            PsiMap::Random,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown psi map {s:?}")))
    }
}

/// `f(u ⊗ v) = ⟨v|φ(u)|v⟩` with `φ(u) = w0 |ψ(u)⟩⟨ψ(u)|` (or `(w0/d2) I`),
/// `w0 = w / d1`.
///
/// Every `φ(u)` is positive semidefinite with trace `w0`, so the sum over
/// any product basis `{u_i ⊗ v_j}` is `Σ_i tr φ(u_i) = d1 w0 = w`, whatever
/// the dependence on `u`. Bases that pair several first-factor bases with
/// one second-factor basis see the nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleOracle<T: Real> {
    dims: Dims,
    weight: T,
    w0: T,
    psi: PsiMap,
    seed: u64,
    mixing: Option<CMatrix<T>>,
}

pub fn counterexample_oracle<T: Real>(
    dims: &Dims,
    weight: T,
    psi: PsiMap,
    seed: u64,
) -> Result<CounterexampleOracle<T>> {
    if dims.len() != 2 {
        return Err(Error::UnsupportedDims(format!(
            "counterexample needs two factors, got {dims}"
        )));
    }
    if weight <= T::zero() {
        return Err(Error::InvalidArgument("weight must be positive".into()));
    }
    let (d1, d2) = (dims.factors()[0], dims.factors()[1]);
    let mixing = (psi == PsiMap::Random)
        .then(|| random::gaussian_matrix::<T, _>(d2, d1, &mut rng(seed)));
    Ok(CounterexampleOracle {
        dims: dims.clone(),
        weight,
        w0: weight / lit(d1 as f64),
        psi,
        seed,
        mixing,
    })
}

impl<T: Real> CounterexampleOracle<T> {
    pub fn psi_map(&self) -> PsiMap {
        self.psi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn w0(&self) -> T {
        self.w0
    }

    /// Unit `ψ(u)` in `C^{d2}`; `None` for [`PsiMap::Constant`].
    pub fn psi(&self, u: &FactorState<T>) -> Option<CVector<T>> {
        let d2 = self.dims.factors()[1];
        let embed = |v: CVector<T>| -> CVector<T> {
            let mut out = CVector::zeros(d2);
            for (k, z) in v.iter().take(d2).enumerate() {
                out[k] = *z;
            }
            normalize_or_first(out)
        };
        let amps = u.amplitudes();
        match self.psi {
            PsiMap::Constant => None,
            PsiMap::ConjugateEmbedding => Some(embed(amps.map(|z| z.conj()))),
            PsiMap::ModulusWeightedConjugate => {
                Some(embed(amps.map(|z| z.conj() * real(modulus(z)))))
            }
            PsiMap::Random => {
                let m = self.mixing.as_ref().unwrap();
                Some(normalize_or_first(m * amps.map(|z| z.conj())))
            }
        }
    }

    /// `φ(u)`.
    pub fn phi(&self, u: &FactorState<T>) -> HermitianOp<T> {
        let d2 = self.dims.factors()[1];
        match self.psi(u) {
            Some(v) => HermitianOp::projector(&v).scale(self.w0),
            None => HermitianOp::identity(d2).scale(self.w0 / lit(d2 as f64)),
        }
    }
}

/// `v/‖v‖`, or `e_0` when `v` vanishes.
fn normalize_or_first<T: Real>(v: CVector<T>) -> CVector<T> {
    let n = crate::tensor::vec_norm(&v);
    if n > T::default_epsilon() * T::default_epsilon() {
        v.unscale(n)
    } else {
        FactorState::basis(v.len(), 0).into_amplitudes()
    }
}

impl<T: Real> FrameOracle<T> for CounterexampleOracle<T> {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn declared_weight(&self) -> T {
        self.weight
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        let v = p.factor(1).amplitudes();
        match self.psi(p.factor(0)) {
            Some(psi) => self.w0 * psi.dotc(v).norm_sqr(),
            None => self.w0 / lit(self.dims.factors()[1] as f64),
        }
    }
}

/// `Σ_k λ_k f_k` over oracles on the same dims.
#[derive(Clone)]
pub struct MixtureOracle<T: Real> {
    dims: Dims,
    parts: Vec<(T, Arc<dyn FrameOracle<T>>)>,
}

impl<T: Real> MixtureOracle<T> {
    pub fn new(parts: Vec<(T, Arc<dyn FrameOracle<T>>)>) -> Result<Self> {
        let dims = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1
            .dims()
            .clone();
        if let Some((_, o)) = parts.iter().find(|(_, o)| o.dims() != &dims) {
            return Err(Error::DimensionMismatch {
                expected: dims.to_string(),
                found: o.dims().to_string(),
            });
        }
        Ok(Self { dims, parts })
    }
}

impl<T: Real> FrameOracle<T> for MixtureOracle<T> {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn declared_weight(&self) -> T {
        self.parts
            .iter()
            .fold(T::zero(), |acc, (l, o)| acc + *l * o.declared_weight())
    }
    fn eval(&self, p: &ProductState<T>) -> T {
        self.parts
            .iter()
            .fold(T::zero(), |acc, (l, o)| acc + *l * o.eval(p))
    }
}

/// Source of unentangled bases for [`verify_frame`].
pub trait BasisSource<T: Real>: Sync {
    fn dims(&self) -> &Dims;
    fn basis(&self, index: u64) -> Result<UnentangledBasis<T>>;
    fn describe(&self) -> String;
}

/// One [`BasisFamily`] stream over fixed dims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySource {
    pub dims: Dims,
    pub family: BasisFamily,
    pub seed: u64,
}

impl FamilySource {
    pub fn new(dims: &Dims, family: BasisFamily, seed: u64) -> Self {
        Self {
            dims: dims.clone(),
            family,
            seed,
        }
    }
}

impl<T: Real> BasisSource<T> for FamilySource {
    fn dims(&self) -> &Dims {
        &self.dims
    }
    fn basis(&self, index: u64) -> Result<UnentangledBasis<T>> {
        self.family.sample(&self.dims, self.seed, index)
    }
    fn describe(&self) -> String {
        format!("{} bases on {} (seed {})", self.family.name(), self.dims, self.seed)
    }
}

/// Sums of an oracle over sampled bases.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport<T: Real> {
    pub weight: T,
    /// One entry per valid basis, in sample order.
    pub sums: Vec<T>,
    pub mean: T,
    pub max_deviation: T,
    /// Samples whose basis failed generation or orthonormality at 1e-10
    /// (or the scalar's unit tolerance, if larger).
    pub invalid_bases: usize,
    pub samples: usize,
    pub pass: bool,
}

/// Evaluates `oracle` over `samples` bases from `source` and compares each
/// sum to the declared weight. Invalid bases are counted, not skipped
/// silently; any invalid basis fails the report.
pub fn verify_frame<T: Real, O: FrameOracle<T> + ?Sized, S: BasisSource<T> + ?Sized>(
    oracle: &O,
    source: &S,
    samples: usize,
    tol: T,
) -> Result<FrameReport<T>> {
    if source.dims() != oracle.dims() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dims().to_string(),
            found: source.dims().to_string(),
        });
    }
    let basis_tol: T = lit::<T>(DEFAULT_ORTHO_TOL).max(T::unit_tolerance());
    let outcomes: Vec<Option<T>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let basis = source.basis(i).ok()?;
            basis.validate(basis_tol).pass.then(|| {
                basis
                    .members()
                    .iter()
                    .fold(T::zero(), |acc, m| acc + oracle.eval(m))
            })
        })
        .collect();
    let weight = oracle.declared_weight();
    let sums: Vec<T> = outcomes.iter().flatten().copied().collect();
    let invalid_bases = outcomes.len() - sums.len();
    let max_deviation = sums
        .iter()
        .fold(T::zero(), |acc, s| acc.max((*s - weight).abs()));
    let mean = if sums.is_empty() {
        T::zero()
    } else {
        sums.iter().fold(T::zero(), |a, b| a + *b) / lit(sums.len() as f64)
    };
    Ok(FrameReport {
        weight,
        pass: invalid_bases == 0 && !sums.is_empty() && max_deviation <= tol,
        sums,
        mean,
        max_deviation,
        invalid_bases,
        samples,
    })
}

/// Largest `|f(p) − f(p')|` where `p'` is `p` with one factor multiplied by
/// a random unit scalar, over `samples` random `(p, factor, phase)` draws.
pub fn phase_invariance_check<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    samples: usize,
    seed: u64,
) -> T {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng_stream(seed, i);
            let p = random::random_product_state::<T, _>(oracle.dims(), &mut r);
            let j = (i as usize) % oracle.dims().len();
            let lambda: Complex<T> = random::random_phase(&mut r);
            (oracle.eval(&p) - oracle.eval(&p.with_factor_scaled(j, lambda))).abs()
        })
        .reduce(T::zero, |a, b| a.max(b))
}

/// Unentangled frame sums against `weight` for one explicit basis.
pub fn basis_sum<T: Real, O: FrameOracle<T> + ?Sized>(oracle: &O, basis: &UnentangledBasis<T>) -> T {
    basis
        .members()
        .iter()
        .fold(T::zero(), |acc, m| acc + oracle.eval(m))
}

/// Searches the reversed-structure family for the basis whose sum deviates
/// most from the declared weight. Returns `(index, sum)` of the worst one.
pub fn worst_reversed_basis<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    seed: u64,
    tries: usize,
) -> Result<(u64, T)> {
    let weight = oracle.declared_weight();
    let dims = oracle.dims().clone();
    let sums: Vec<Result<(u64, T)>> = (0..tries as u64)
        .into_par_iter()
        .map(|i| {
            let b = BasisFamily::Reversed.sample::<T>(&dims, seed, i)?;
            Ok((i, basis_sum(oracle, &b)))
        })
        .collect();
    let mut best: Option<(u64, T)> = None;
    for s in sums {
        let (i, v) = s?;
        let better = match best {
            None => true,
            Some((_, b)) => (v - weight).abs() > (b - weight).abs(),
        };
        if better {
            best = Some((i, v));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no tries".into()))
}

/// `qubit_hat`-paired values `g(a) + g(â)` for a sampled `a`; convenience
/// for checking the antipodal identity.
pub fn antipodal_sum<T: Real>(g: &QubitFrameFn<T>, a: &FactorState<T>) -> Result<T> {
    Ok(qubit_frame_eval(g, a)? + qubit_frame_eval(g, &qubit_hat(a)?)?)
}
