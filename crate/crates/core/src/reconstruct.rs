//! Recovering the operator behind a Born-form oracle from its values on
//! product states, and measuring how far an arbitrary oracle is from any
//! Born form.
//!
//! For one factor with reference basis `{v_p}`, the `d²` probe states
//!
//! ```text
//! σ(p,p) = v_p
//! σ(p,q) = (v_p + v_q)/√2        p < q
//! σ(p,q) = (v_q + i v_p)/√2      p > q
//! ```
//!
//! give `⟨σ|B|σ⟩ = B_pp`, `½(B_pp + B_qq) + Re B_pq` and
//! `½(B_pp + B_qq) − Im B_qp` respectively, so the linear map from
//! Hermitian `B` to its probe values is invertible. On a tensor product the
//! probe map is the Kronecker product of the per-factor maps, and the
//! operator is recovered by applying each factor's inverse along its mode
//! of the grid of oracle values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::FrameOracle;
use crate::random;
use crate::scalar::{lit, Real};
use crate::tensor::{
    modulus, real, CMatrix, CVector, Dims, FactorState, HermitianOp, ProductState,
};

/// Polarization probes for one factor and the inverse of their value map.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationMap<T: Real> {
    dim: usize,
    /// Probe coordinates in the reference basis, indexed `p * d + q`.
    coords: Vec<CVector<T>>,
    /// Probe states in the ambient coordinates.
    probes: Vec<CVector<T>>,
    forward: CMatrix<T>,
    inverse: CMatrix<T>,
    condition: T,
}

fn probe_coords<T: Real>(d: usize) -> Vec<CVector<T>> {
    let s: T = lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            let mut v = CVector::zeros(d);
            if p == q {
                v[p] = real(T::one());
            } else if p < q {
                v[p] = real(s);
                v[q] = real(s);
            } else {
                v[q] = real(s);
                v[p] = Complex::new(T::zero(), s);
            }
            out.push(v);
        }
    }
    out
}

/// Probe map of `C^d` against the standard basis.
pub fn factor_polarization_map<T: Real>(d: usize) -> Result<PolarizationMap<T>> {
    polarization_map_in_basis(&CMatrix::identity(d, d))
}

/// Probe map against the orthonormal columns of `reference`. Values are
/// interpreted as entries of `Vᴴ B V`.
pub fn polarization_map_in_basis<T: Real>(reference: &CMatrix<T>) -> Result<PolarizationMap<T>> {
    let d = reference.nrows();
    if d == 0 || !reference.is_square() {
        return Err(Error::InvalidArgument("reference basis must be square".into()));
    }
    let coords = probe_coords::<T>(d);
    // row (p,q), column (r,s): coefficient of B_rs in ⟨σ|B|σ⟩
    let forward = CMatrix::from_fn(d * d, d * d, |row, col| {
        let (r, s) = (col / d, col % d);
        coords[row][r].conj() * coords[row][s]
    });
    let sv = forward.clone().singular_values();
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    let smin = sv.iter().fold(smax, |a, &b| a.min(b));
    let inverse = forward
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument(format!("singular probe map for d = {d}")))?;
    let probes = coords.iter().map(|c| reference * c).collect();
    Ok(PolarizationMap {
        dim: d,
        coords,
        probes,
        forward,
        inverse,
        condition: smax / smin,
    })
}

impl<T: Real> PolarizationMap<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Probe states in ambient coordinates, ordered `p * d + q`.
    pub fn probes(&self) -> &[CVector<T>] {
        &self.probes
    }

    /// 2-norm condition number of the probe value map.
    pub fn condition(&self) -> T {
        self.condition
    }

    pub fn forward(&self) -> &CMatrix<T> {
        &self.forward
    }

    pub fn inverse(&self) -> &CMatrix<T> {
        &self.inverse
    }

    /// `⟨σ(p,q)|B|σ(p,q)⟩` for every probe, with `B` in reference coordinates.
    pub fn probe_values(&self, b: &CMatrix<T>) -> Vec<T> {
        self.coords
            .iter()
            .map(|c| c.dotc(&(b * c)).re)
            .collect()
    }

    /// Inverts [`PolarizationMap::probe_values`].
    pub fn recover(&self, values: &[T]) -> CMatrix<T> {
        let v = CVector::from_iterator(values.len(), values.iter().map(|&x| real(x)));
        let flat = &self.inverse * v;
        CMatrix::from_fn(self.dim, self.dim, |r, s| flat[r * self.dim + s])
    }
}

/// Product of per-factor probe sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationGrid<T: Real> {
    dims: Dims,
    maps: Vec<PolarizationMap<T>>,
}

impl<T: Real> PolarizationGrid<T> {
    pub fn standard(dims: &Dims) -> Result<Self> {
        let maps = dims
            .factors()
            .iter()
            .map(|&d| factor_polarization_map(d))
            .collect::<Result<_>>()?;
        Ok(Self {
            dims: dims.clone(),
            maps,
        })
    }

    /// Grid against one orthonormal reference basis per factor.
    pub fn in_bases(dims: &Dims, references: &[CMatrix<T>]) -> Result<Self> {
        if references.len() != dims.len()
            || references
                .iter()
                .zip(dims.factors())
                .any(|(r, &d)| r.nrows() != d)
        {
            return Err(Error::DimensionMismatch {
                expected: dims.to_string(),
                found: format!(
                    "{:?}",
                    references.iter().map(|r| r.nrows()).collect::<Vec<_>>()
                ),
            });
        }
        let maps = references
            .iter()
            .map(polarization_map_in_basis)
            .collect::<Result<_>>()?;
        Ok(Self {
            dims: dims.clone(),
            maps,
        })
    }

    pub fn maps(&self) -> &[PolarizationMap<T>] {
        &self.maps
    }

    /// `∏ d_j²`, the real dimension of the Hermitian operators on the space.
    pub fn len(&self) -> usize {
        self.maps.iter().map(|m| m.dim * m.dim).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn mode_sizes(&self) -> Vec<usize> {
        self.maps.iter().map(|m| m.dim * m.dim).collect()
    }

    /// Probe product state number `flat`, lexicographic over factors.
    pub fn probe(&self, flat: usize) -> ProductState<T> {
        let sizes = self.mode_sizes();
        let mut rem = flat;
        let mut idx = vec![0; sizes.len()];
        for (slot, &m) in idx.iter_mut().zip(&sizes).rev() {
            *slot = rem % m;
            rem /= m;
        }
        ProductState::new(
            idx.iter()
                .zip(&self.maps)
                .map(|(&k, map)| FactorState::from_unit_unchecked(map.probes[k].clone()))
                .collect(),
        )
    }

    /// Applies the inverse per-factor maps to a grid of values and returns
    /// the (not yet symmetrized) coefficient matrix.
    pub fn invert(&self, values: &[T]) -> CMatrix<T> {
        let sizes = self.mode_sizes();
        let mut data: Vec<Complex<T>> = values.iter().map(|&v| real(v)).collect();
        for (j, map) in self.maps.iter().enumerate() {
            let m = sizes[j];
            let outer: usize = sizes[..j].iter().product();
            let inner: usize = sizes[j + 1..].iter().product();
            let mut next = vec![Complex::new(T::zero(), T::zero()); data.len()];
            for o in 0..outer {
                for i in 0..inner {
                    for a in 0..m {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for b in 0..m {
                            acc += map.inverse[(a, b)] * data[(o * m + b) * inner + i];
                        }
                        next[(o * m + a) * inner + i] = acc;
                    }
                }
            }
            data = next;
        }
        // data is indexed by (pair_1, …, pair_n) with pair_j = r_j d_j + s_j
        let n = self.dims.total();
        let mut out = CMatrix::zeros(n, n);
        for (flat, z) in data.into_iter().enumerate() {
            let mut rem = flat;
            let mut row = vec![0; sizes.len()];
            let mut col = vec![0; sizes.len()];
            for j in (0..sizes.len()).rev() {
                let pair = rem % sizes[j];
                rem /= sizes[j];
                let d = self.maps[j].dim;
                row[j] = pair / d;
                col[j] = pair % d;
            }
            out[(self.dims.flat_index(&row), self.dims.flat_index(&col))] = z;
        }
        out
    }

    /// Largest per-factor condition number.
    pub fn condition(&self) -> T {
        self.maps
            .iter()
            .fold(T::zero(), |a, m| a.max(m.condition))
    }
}

/// Output of [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T: Real> {
    /// Symmetrized coefficients `(c + cᴴ)/2`, equal to `T` for Born oracles.
    pub coefficients: HermitianOp<T>,
    /// Frobenius norm of `(c − cᴴ)/2` before symmetrization.
    pub asymmetry: T,
    pub probe_condition: T,
    pub evaluations: usize,
}

/// Default asymmetry tolerance for [`reconstruct`].
pub const DEFAULT_ASYMMETRY_TOL: f64 = 1e-8;

/// Evaluates `oracle` on the full product probe grid (`∏ d_j²` states) and
/// inverts the per-factor polarization maps.
pub fn reconstruct<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    dims: &Dims,
) -> Result<Reconstruction<T>> {
    reconstruct_on_grid(oracle, &PolarizationGrid::standard(dims)?, lit(DEFAULT_ASYMMETRY_TOL))
}

/// [`reconstruct`] against an explicit probe grid. Fails with
/// [`Error::Asymmetric`] when the recovered coefficients are not Hermitian
/// to within `tol`.
pub fn reconstruct_on_grid<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    grid: &PolarizationGrid<T>,
    tol: T,
) -> Result<Reconstruction<T>> {
    if oracle.dims() != &grid.dims {
        return Err(Error::DimensionMismatch {
            expected: grid.dims.to_string(),
            found: oracle.dims().to_string(),
        });
    }
    let values: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|k| oracle.eval(&grid.probe(k)))
        .collect();
    let raw = grid.invert(&values);
    let (coefficients, asymmetry) = HermitianOp::hermitize(&raw);
    if asymmetry > tol {
        return Err(Error::Asymmetric(asymmetry.as_f64()));
    }
    Ok(Reconstruction {
        coefficients,
        asymmetry,
        probe_condition: grid.condition(),
        evaluations: values.len(),
    })
}

/// Largest `|f(p) − ⟨p|C|p⟩|` over `samples` random product states: the
/// post hoc check that the oracle really is the Born form of `C`.
pub fn born_consistency<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    coefficients: &HermitianOp<T>,
    samples: usize,
    seed: u64,
) -> T {
    let mut rng = random::rng(seed);
    (0..samples)
        .map(|_| {
            let p = random::random_product_state::<T, _>(oracle.dims(), &mut rng);
            (oracle.eval(&p) - coefficients.expectation(&p.expand())).abs()
        })
        .fold(T::zero(), |a, b| a.max(b))
}

/// Least-squares Born fit of an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport<T: Real> {
    /// RMS of `f(p) − ⟨p|T|p⟩` at the best Hermitian `T`.
    pub residual: T,
    pub samples: usize,
    pub seed: u64,
    /// Fewer samples than real parameters (`N²`).
    pub underdetermined: bool,
    pub fitted: HermitianOp<T>,
}

/// Ridge added to the normal equations.
pub const FIT_RIDGE: f64 = 1e-12;

/// Real features of `x` such that `⟨x|T|x⟩ = features · θ(T)`, where `θ`
/// lists `T_rr`, `Re T_rs` at `(r, s)` and `Im T_rs` at `(s, r)` for `r < s`.
fn born_features<T: Real>(x: &CVector<T>) -> DVector<T> {
    let n = x.len();
    let two: T = lit(2.0);
    let mut f = DVector::zeros(n * n);
    for r in 0..n {
        f[r * n + r] = x[r].norm_sqr();
        for s in r + 1..n {
            let z = x[r].conj() * x[s];
            f[r * n + s] = two * z.re;
            f[s * n + r] = -two * z.im;
        }
    }
    f
}

fn operator_from_params<T: Real>(theta: &DVector<T>, n: usize) -> HermitianOp<T> {
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = real(theta[r * n + r]);
        for s in r + 1..n {
            let z = Complex::new(theta[r * n + s], theta[s * n + r]);
            m[(r, s)] = z;
            m[(s, r)] = z.conj();
        }
    }
    HermitianOp::hermitize(&m).0
}

/// Minimum over Hermitian `T` of the RMS misfit between `oracle` and
/// `⟨x|T|x⟩` on `samples` seeded random product states, solved through the
/// normal equations with a 1e-12 ridge.
pub fn hermitian_fit_residual<T: Real, O: FrameOracle<T> + ?Sized>(
    oracle: &O,
    dims: &Dims,
    samples: usize,
    seed: u64,
) -> Result<FitReport<T>> {
    if oracle.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims.to_string(),
            found: oracle.dims().to_string(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let n = dims.total();
    let params = n * n;
    let mut rng = random::rng(seed);
    let states: Vec<ProductState<T>> = (0..samples)
        .map(|_| random::random_product_state(dims, &mut rng))
        .collect();
    let rows: Vec<(DVector<T>, T)> = states
        .par_iter()
        .map(|p| (born_features(&p.expand()), oracle.eval(p)))
        .collect();
    let a = DMatrix::from_fn(samples, params, |i, k| rows[i].0[k]);
    let y = DVector::from_iterator(samples, rows.iter().map(|r| r.1));
    let mut gram = a.tr_mul(&a);
    for k in 0..params {
        gram[(k, k)] += lit(FIT_RIDGE);
    }
    let rhs = a.tr_mul(&y);
    let theta = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("normal equations not positive definite".into()))?
        .solve(&rhs);
    let misfit = &a * &theta - &y;
    let residual = (misfit.norm_squared() / lit(samples as f64)).sqrt();
    Ok(FitReport {
        residual,
        samples,
        seed,
        underdetermined: samples < params,
        fitted: operator_from_params(&theta, n),
    })
}

/// `(⊗_j U_j)`, factor 1 slowest.
pub fn kron_unitaries<T: Real>(us: &[CMatrix<T>]) -> CMatrix<T> {
    us.iter()
        .fold(CMatrix::identity(1, 1), |acc, u| acc.kronecker(u))
}

/// Largest modulus among the entries of `m`.
pub fn max_entry<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, z| a.max(modulus(*z)))
}
