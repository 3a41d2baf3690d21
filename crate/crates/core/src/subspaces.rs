//! Entangled subspaces: the dimension bound, an explicit construction that
//! attains it, and numeric and exact searches for product vectors.
//!
//! The construction uses the total-degree functionals
//! `λ_t(x) = Σ_I x_I t^{|I|}` at `d = Σ(d_j − 1) + 1` distinct points. On a
//! product vector `λ_t(⊗h_j) = ∏_j Σ_i h_j[i] t^i`, a polynomial in `t` of
//! degree at most `d − 1`, so vanishing at all `d` points forces one factor
//! polynomial, hence one `h_j`, to be zero. Since the degrees `|I|` run over
//! exactly `0..d`, the joint kernel is the set of vectors whose entries sum
//! to zero within every degree class.

use nalgebra::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::random;
use crate::scalar::{lit, Real};
use crate::tensor::{
    modulus, real, CMatrix, CVector, Dims, FactorState, ProductState, Subspace,
};

/// `∏ d_j − Σ(d_j − 1) − 1`, the largest dimension of a subspace without
/// nonzero product vectors.
pub fn max_entangled_dim(dims: &Dims) -> usize {
    dims.total() - dims.segre_dim()
}

/// Default evaluation points `1, 2, …, d`.
pub fn default_points(dims: &Dims) -> Vec<f64> {
    (1..=dims.segre_dim()).map(|k| k as f64).collect()
}

fn check_points(dims: &Dims, points: &[f64]) -> Result<()> {
    let want = dims.segre_dim();
    if points.len() != want {
        return Err(Error::WrongPointCount {
            expected: want,
            found: points.len(),
        });
    }
    if points.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("points must be finite".into()));
    }
    for (k, a) in points.iter().enumerate() {
        if points[k + 1..].contains(a) {
            return Err(Error::RepeatedPoints);
        }
    }
    Ok(())
}

/// Functional rows `λ_t` for each point, as coefficient vectors.
pub fn vandermonde_functionals<T: Real>(dims: &Dims, points: &[f64]) -> Result<Vec<CVector<T>>> {
    check_points(dims, points)?;
    let degrees: Vec<usize> = (0..dims.total()).map(|k| dims.degree(k)).collect();
    Ok(points
        .iter()
        .map(|&t| {
            let powers: Vec<T> = (0..dims.segre_dim())
                .map(|e| lit(t.powi(e as i32)))
                .collect();
            CVector::from_iterator(degrees.len(), degrees.iter().map(|&g| real(powers[g])))
        })
        .collect())
}

/// Orthonormal basis of the joint kernel of the degree-class sums: inside
/// each class of size `g`, the `g − 1` discrete Fourier vectors orthogonal
/// to the all-ones vector.
fn degree_class_kernel<T: Real>(dims: &Dims) -> CMatrix<T> {
    let n = dims.total();
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); dims.segre_dim()];
    for k in 0..n {
        classes[dims.degree(k)].push(k);
    }
    let mut cols = Vec::with_capacity(n - classes.len());
    for class in &classes {
        let g = class.len();
        let norm = lit::<T>(1.0 / (g as f64).sqrt());
        for f in 1..g {
            let mut v = CVector::zeros(n);
            for (m, &k) in class.iter().enumerate() {
                let angle = 2.0 * std::f64::consts::PI * ((f * m) % g) as f64 / g as f64;
                v[k] = Complex::new(lit::<T>(angle.cos()), lit::<T>(angle.sin())) * norm;
            }
            cols.push(v);
        }
    }
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// How a candidate subspace was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    Vandermonde { points: Vec<f64> },
    Random { seed: u64, dim: usize },
}

/// Why a subspace is believed entangled, or why it is not.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T: Real> {
    ExactByConstruction,
    Numeric { max_overlap: T, restarts: usize },
    Refuted { witness: ProductState<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangledSubspaceCert<T: Real> {
    pub dims: Dims,
    pub subspace: Subspace<T>,
    pub construction: Construction,
    pub certificate: Certificate<T>,
}

/// Kernel of the Vandermonde functionals at `points` (default `1..=d`).
/// Its dimension is exactly [`max_entangled_dim`].
pub fn vandermonde_subspace<T: Real>(
    dims: &Dims,
    points: Option<&[f64]>,
) -> Result<EntangledSubspaceCert<T>> {
    let points = points.map_or_else(|| default_points(dims), <[f64]>::to_vec);
    check_points(dims, &points)?;
    Ok(EntangledSubspaceCert {
        dims: dims.clone(),
        subspace: Subspace::from_matrix_unchecked(degree_class_kernel(dims)),
        construction: Construction::Vandermonde { points },
        certificate: Certificate::ExactByConstruction,
    })
}

/// Haar-random subspace of dimension `dim`.
pub fn random_subspace<T: Real>(dims: &Dims, dim: usize, seed: u64) -> Result<Subspace<T>> {
    let n = dims.total();
    if dim > n {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {dim} exceeds {n}"
        )));
    }
    let u = random::random_unitary::<T, _>(n, &mut random::rng(seed));
    Ok(Subspace::from_matrix_unchecked(u.columns(0, dim).into_owned()))
}

/// Search parameters for [`product_overlap_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 100,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

/// One restart of the alternating search.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartLog<T: Real> {
    /// Objective `⟨x|P|x⟩` at the start and after each sweep.
    pub trace: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport<T: Real> {
    /// `max ‖P x‖` over the unit product vectors visited.
    pub best_overlap: T,
    pub witness: ProductState<T>,
    pub best_restart: usize,
    pub restarts: usize,
    pub seed: u64,
    pub logs: Vec<RestartLog<T>>,
}

impl<T: Real> SearchReport<T> {
    pub fn iterations(&self) -> usize {
        self.logs.iter().map(|l| l.iterations).sum()
    }

    pub fn all_converged(&self) -> bool {
        self.logs.iter().all(|l| l.converged)
    }

    /// Largest decrease of the objective between sweeps of any restart.
    pub fn max_trace_drop(&self) -> T {
        self.logs
            .iter()
            .flat_map(|l| l.trace.windows(2).map(|w| w[0] - w[1]))
            .fold(T::zero(), |a, b| a.max(b))
    }
}

struct Searcher<'a, T: Real> {
    dims: &'a Dims,
    /// Conjugated basis of the subspace, one row per ambient index.
    qbar: CMatrix<T>,
    index: Vec<Vec<usize>>,
}

impl<'a, T: Real> Searcher<'a, T> {
    fn new(dims: &'a Dims, s: &Subspace<T>) -> Self {
        Self {
            dims,
            qbar: s.basis().conjugate(),
            index: (0..dims.total()).map(|k| dims.multi_index(k)).collect(),
        }
    }

    /// `W` with `Σ_c |(W h_j)_c|²` equal to the objective as a function of
    /// factor `j` alone.
    fn contraction(&self, h: &[CVector<T>], j: usize) -> CMatrix<T> {
        let k = self.qbar.ncols();
        let mut w = CMatrix::zeros(k, self.dims.factors()[j]);
        for (flat, idx) in self.index.iter().enumerate() {
            let mut weight = real(T::one());
            for (l, &i) in idx.iter().enumerate() {
                if l != j {
                    weight *= h[l][i];
                }
            }
            if weight == real(T::zero()) {
                continue;
            }
            for c in 0..k {
                w[(c, idx[j])] += self.qbar[(flat, c)] * weight;
            }
        }
        w
    }

    fn objective(&self, h: &[CVector<T>]) -> T {
        let w = self.contraction(h, 0);
        (w * &h[0]).norm_squared()
    }

    fn run(&self, mut h: Vec<CVector<T>>, opts: &SearchOptions) -> (T, Vec<CVector<T>>, RestartLog<T>) {
        let tol: T = lit(opts.tol);
        let mut value = self.objective(&h);
        let mut trace = vec![value];
        let mut converged = false;
        let mut iterations = 0;
        if self.qbar.ncols() > 0 {
            while iterations < opts.max_iters {
                iterations += 1;
                for j in 0..h.len() {
                    let w = self.contraction(&h, j);
                    let gram = w.adjoint() * &w;
                    let eig = gram.symmetric_eigen();
                    let (top, _) = eig
                        .eigenvalues
                        .iter()
                        .enumerate()
                        .fold((0, T::min_value().unwrap()), |acc, (k, &e)| {
                            if e > acc.1 {
                                (k, e)
                            } else {
                                acc
                            }
                        });
                    let v = eig.eigenvectors.column(top).into_owned();
                    let norm = v.norm();
                    h[j] = v.unscale(norm);
                }
                let next = self.objective(&h);
                let gain = next - value;
                value = next;
                trace.push(value);
                if gain < tol {
                    converged = true;
                    break;
                }
            }
        } else {
            converged = true;
        }
        (
            value,
            h,
            RestartLog {
                trace,
                iterations,
                converged,
            },
        )
    }
}

fn report_from<T: Real>(
    dims: &Dims,
    runs: Vec<(T, Vec<CVector<T>>, RestartLog<T>)>,
    seed: u64,
) -> SearchReport<T> {
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = k;
        }
    }
    let witness = ProductState::with_dims(
        dims,
        runs[best]
            .1
            .iter()
            .map(|v| FactorState::from_unit_unchecked(v.clone()))
            .collect(),
    )
    .expect("search keeps factor dimensions")
    .canonical();
    let value = runs[best].0.max(T::zero()).sqrt().min(T::one());
    SearchReport {
        best_overlap: value,
        witness,
        best_restart: best,
        restarts: runs.len(),
        seed,
        logs: runs.into_iter().map(|r| r.2).collect(),
    }
}

/// Alternating maximization of `⟨x|P|x⟩` over unit product vectors, from
/// `opts.restarts` random starts. Restart `r` draws its start from stream
/// `r` of `opts.seed`, so results do not depend on scheduling.
pub fn product_overlap_search<T: Real>(
    dims: &Dims,
    s: &Subspace<T>,
    opts: &SearchOptions,
) -> Result<SearchReport<T>> {
    let starts: Vec<ProductState<T>> = (0..opts.restarts.max(1))
        .map(|r| random::random_product_state(dims, &mut random::rng_stream(opts.seed, r as u64)))
        .collect();
    product_overlap_search_from(dims, s, &starts, opts)
}

/// [`product_overlap_search`] from explicit starting states.
pub fn product_overlap_search_from<T: Real>(
    dims: &Dims,
    s: &Subspace<T>,
    starts: &[ProductState<T>],
    opts: &SearchOptions,
) -> Result<SearchReport<T>> {
    if s.ambient() != dims.total() {
        return Err(Error::LengthMismatch(dims.total(), s.ambient()));
    }
    if starts.is_empty() {
        return Err(Error::InvalidArgument("no starting states".into()));
    }
    if let Some(p) = starts.iter().find(|p| p.dims() != dims) {
        return Err(Error::DimensionMismatch {
            expected: dims.to_string(),
            found: p.dims().to_string(),
        });
    }
    let searcher = Searcher::new(dims, s);
    let runs: Vec<_> = starts
        .par_iter()
        .map(|p| {
            let h = p.factors().iter().map(|f| f.amplitudes().clone()).collect();
            searcher.run(h, opts)
        })
        .collect();
    Ok(report_from(dims, runs, opts.seed))
}

/// Outcome of [`exact_rank1_test_small`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport<T: Real> {
    pub witness: Option<ProductState<T>>,
    /// Largest normalized 2×2 minor at the best candidate combination.
    pub residual: T,
}

/// Minor tolerance for exact tests on normalized combinations.
pub const EXACT_MINOR_TOL: f64 = 1e-8;

fn reshape<T: Real>(v: &CVector<T>, d2: usize) -> CMatrix<T> {
    CMatrix::from_fn(2, d2, |a, b| v[a * d2 + b])
}

fn minors<T: Real>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    let d2 = m.ncols();
    let mut out = Vec::new();
    for b in 0..d2 {
        for c in b + 1..d2 {
            out.push(m[(0, b)] * m[(1, c)] - m[(0, c)] * m[(1, b)]);
        }
    }
    out
}

fn max_normalized_minor<T: Real>(m: &CMatrix<T>) -> T {
    let scale = m.norm_squared();
    if scale <= T::zero() {
        return T::zero();
    }
    minors(m)
        .into_iter()
        .fold(T::zero(), |a, z| a.max(modulus(z) / scale))
}

fn rank_one_witness<T: Real>(m: &CMatrix<T>) -> ProductState<T> {
    let svd = m.clone().svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let top = svd
        .singular_values
        .iter()
        .enumerate()
        .fold(0, |best, (k, &s)| if s > svd.singular_values[best] { k } else { best });
    ProductState::new(vec![
        FactorState::from_unit_unchecked(u.column(top).into_owned()),
        FactorState::from_unit_unchecked(v_t.row(top).transpose()),
    ])
    .canonical()
}

fn complex_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = modulus(z);
    let half: T = lit(0.5);
    let re = ((r + z.re) * half).max(T::zero()).sqrt();
    let im = ((r - z.re) * half).max(T::zero()).sqrt();
    Complex::new(re, if z.im < T::zero() { -im } else { im })
}

/// Projective roots `(α:β)` of `a α² + b αβ + c β²`, not all coefficients zero.
fn binary_quadratic_roots<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Vec<(Complex<T>, Complex<T>)> {
    let one = real(T::one());
    let zero = real(T::zero());
    // solve in the ratio whose leading coefficient is larger
    let (lead, mid, tail, flip) = if modulus(a) >= modulus(c) {
        (a, b, c, false)
    } else {
        (c, b, a, true)
    };
    let scale = modulus(a).max(modulus(b)).max(modulus(c));
    let mut ratios = Vec::new();
    if modulus(lead) <= scale * lit(1e-14) {
        // a ≈ c ≈ 0: b αβ
        return vec![(one, zero), (zero, one)];
    }
    let disc = mid * mid - lead * tail * lit::<T>(4.0);
    let s = complex_sqrt(disc);
    let s = if (mid.conj() * s).re < T::zero() { -s } else { s };
    let q = (mid + s) * lit::<T>(-0.5);
    if modulus(q) > T::zero() {
        ratios.push(q / lead);
        ratios.push(tail / q);
    } else {
        ratios.push(zero);
    }
    ratios
        .into_iter()
        .map(|z| if flip { (one, z) } else { (z, one) })
        .collect()
}

/// Exact search for product vectors in a subspace of `C^2 ⊗ C^{d₂}` of
/// dimension 1 or 2. A vector is a product exactly when its `2 × d₂`
/// reshape has rank one, i.e. all `2 × 2` minors vanish. In dimension 2
/// each minor of `αA + βB` is a binary quadratic form; candidate roots of
/// the dominant form are tested against all the others.
pub fn exact_rank1_test_small<T: Real>(dims: &Dims, s: &Subspace<T>) -> Result<ExactReport<T>> {
    let f = dims.factors();
    if f.len() != 2 || f[0] != 2 || !(2..=3).contains(&f[1]) {
        return Err(Error::UnsupportedDims(format!(
            "exact test needs (2,2) or (2,3), got {dims}"
        )));
    }
    if s.ambient() != dims.total() {
        return Err(Error::LengthMismatch(dims.total(), s.ambient()));
    }
    let d2 = f[1];
    let tol: T = lit(EXACT_MINOR_TOL);
    let cols = s.columns();
    match cols.len() {
        1 => {
            let a = reshape(&cols[0], d2);
            let residual = max_normalized_minor(&a);
            Ok(ExactReport {
                witness: (residual <= tol).then(|| rank_one_witness(&a)),
                residual,
            })
        }
        2 => {
            let a = reshape(&cols[0], d2);
            let b = reshape(&cols[1], d2);
            let (ma, mb) = (minors(&a), minors(&b));
            let mab = minors(&(&a + &b));
            // coefficients of α², αβ, β² for each minor
            let forms: Vec<[Complex<T>; 3]> = (0..ma.len())
                .map(|k| [ma[k], mab[k] - ma[k] - mb[k], mb[k]])
                .collect();
            let size = |q: &[Complex<T>; 3]| q.iter().fold(T::zero(), |m, z| m.max(modulus(*z)));
            let pivot = forms
                .iter()
                .fold(&forms[0], |p, q| if size(q) > size(p) { q } else { p });
            if size(pivot) <= tol {
                return Ok(ExactReport {
                    witness: Some(rank_one_witness(&a)),
                    residual: max_normalized_minor(&a),
                });
            }
            let mut best: Option<(T, CMatrix<T>)> = None;
            for (al, be) in binary_quadratic_roots(pivot[0], pivot[1], pivot[2]) {
                let m = a.map(|z| z * al) + b.map(|z| z * be);
                let r = max_normalized_minor(&m);
                if best.as_ref().is_none_or(|(v, _)| r < *v) {
                    best = Some((r, m));
                }
            }
            let (residual, m) = best.expect("quadratic has a root");
            Ok(ExactReport {
                witness: (residual <= tol).then(|| rank_one_witness(&m)),
                residual,
            })
        }
        k => Err(Error::UnsupportedDims(format!(
            "exact test needs subspace dimension 1 or 2, got {k}"
        ))),
    }
}

/// Thresholds for [`entangled_verdict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictPolicy {
    /// Overlap above which a product vector counts as found.
    pub found: f64,
    /// Overlap below which, after enough restarts, none is believed to exist.
    pub not_found: f64,
    pub min_restarts: usize,
    pub search: SearchOptions,
    /// Use the exact test when the size allows it.
    pub exact_small: bool,
}

impl Default for VerdictPolicy {
    fn default() -> Self {
        Self {
            found: 1.0 - 1e-6,
            not_found: 1.0 - 1e-3,
            min_restarts: 100,
            search: SearchOptions::default(),
            exact_small: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T: Real> {
    CertifiedEntangled,
    NumericallyEntangled { best_overlap: T, restarts: usize },
    ContainsProduct { witness: ProductState<T>, best_overlap: T },
    Inconclusive { best_overlap: T, restarts: usize },
}

impl<T: Real> Verdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::CertifiedEntangled => "certified_entangled",
            Verdict::NumericallyEntangled { .. } => "numerically_entangled",
            Verdict::ContainsProduct { .. } => "contains_product",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl VerdictPolicy {
    /// Classifies a finished search.
    pub fn classify<T: Real>(&self, report: &SearchReport<T>) -> Verdict<T> {
        let overlap = report.best_overlap.as_f64();
        if overlap > self.found {
            Verdict::ContainsProduct {
                witness: report.witness.clone(),
                best_overlap: report.best_overlap,
            }
        } else if overlap < self.not_found && report.restarts >= self.min_restarts {
            Verdict::NumericallyEntangled {
                best_overlap: report.best_overlap,
                restarts: report.restarts,
            }
        } else {
            Verdict::Inconclusive {
                best_overlap: report.best_overlap,
                restarts: report.restarts,
            }
        }
    }
}

/// Verdict for a certificate. Exact constructions are accepted as they
/// stand; numeric certificates are reclassified under `policy`.
pub fn cert_verdict<T: Real>(cert: &EntangledSubspaceCert<T>, policy: &VerdictPolicy) -> Verdict<T> {
    match &cert.certificate {
        Certificate::ExactByConstruction => Verdict::CertifiedEntangled,
        Certificate::Refuted { witness } => Verdict::ContainsProduct {
            witness: witness.clone(),
            best_overlap: T::one(),
        },
        Certificate::Numeric {
            max_overlap,
            restarts,
        } => {
            let overlap = max_overlap.as_f64();
            if overlap > policy.found {
                Verdict::Inconclusive {
                    best_overlap: *max_overlap,
                    restarts: *restarts,
                }
            } else if overlap < policy.not_found && *restarts >= policy.min_restarts {
                Verdict::NumericallyEntangled {
                    best_overlap: *max_overlap,
                    restarts: *restarts,
                }
            } else {
                Verdict::Inconclusive {
                    best_overlap: *max_overlap,
                    restarts: *restarts,
                }
            }
        }
    }
}

/// A verdict with the evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictDetail<T: Real> {
    pub verdict: Verdict<T>,
    pub exact: Option<ExactReport<T>>,
    pub search: Option<SearchReport<T>>,
}

/// Decides whether `s` contains a product vector: exactly on `(2,2)` and
/// `(2,3)` subspaces of dimension at most 2, by search otherwise.
pub fn entangled_verdict<T: Real>(dims: &Dims, s: &Subspace<T>, policy: &VerdictPolicy) -> Result<Verdict<T>> {
    Ok(entangled_verdict_detail(dims, s, policy)?.verdict)
}

pub fn entangled_verdict_detail<T: Real>(
    dims: &Dims,
    s: &Subspace<T>,
    policy: &VerdictPolicy,
) -> Result<VerdictDetail<T>> {
    if s.ambient() != dims.total() {
        return Err(Error::LengthMismatch(dims.total(), s.ambient()));
    }
    if s.dim() == 0 {
        return Ok(VerdictDetail {
            verdict: Verdict::CertifiedEntangled,
            exact: None,
            search: None,
        });
    }
    if policy.exact_small && s.dim() <= 2 {
        if let Ok(exact) = exact_rank1_test_small(dims, s) {
            let verdict = match &exact.witness {
                Some(witness) => Verdict::ContainsProduct {
                    witness: witness.clone(),
                    best_overlap: T::one(),
                },
                None => Verdict::CertifiedEntangled,
            };
            return Ok(VerdictDetail {
                verdict,
                exact: Some(exact),
                search: None,
            });
        }
    }
    let report = product_overlap_search(dims, s, &policy.search)?;
    Ok(VerdictDetail {
        verdict: policy.classify(&report),
        exact: None,
        search: Some(report),
    })
}

/// Random subspace of the given dimension with a numeric certificate.
pub fn random_entangled_candidate<T: Real>(
    dims: &Dims,
    dim: usize,
    seed: u64,
    opts: &SearchOptions,
    policy: &VerdictPolicy,
) -> Result<(EntangledSubspaceCert<T>, SearchReport<T>)> {
    let subspace = random_subspace::<T>(dims, dim, seed)?;
    let report = product_overlap_search(dims, &subspace, opts)?;
    let certificate = if report.best_overlap.as_f64() > policy.found {
        Certificate::Refuted {
            witness: report.witness.clone(),
        }
    } else {
        Certificate::Numeric {
            max_overlap: report.best_overlap,
            restarts: report.restarts,
        }
    };
    Ok((
        EntangledSubspaceCert {
            dims: dims.clone(),
            subspace,
            construction: Construction::Random { seed, dim },
            certificate,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kron, numerical_rank, orthonormal_report, kernel_basis};

    fn dims(f: &[usize]) -> Dims {
        Dims::new(f.to_vec()).unwrap()
    }

    fn e(d: usize, k: usize) -> CVector<f64> {
        FactorState::<f64>::basis(d, k).amplitudes().clone()
    }

    fn quick(restarts: usize, seed: u64) -> SearchOptions {
        SearchOptions {
            restarts,
            seed,
            ..SearchOptions::default()
        }
    }

    #[test]
    fn bound_values() {
        for (f, want) in [
            (&[2, 2][..], 1),
            (&[2, 3], 2),
            (&[3, 3], 4),
            (&[2, 2, 2], 4),
            (&[3, 3, 3], 20),
        ] {
            assert_eq!(max_entangled_dim(&dims(f)), want);
        }
        assert_eq!(max_entangled_dim(&dims(&[5])), 0);
    }

    #[test]
    fn bound_formula_on_grid() {
        for n in 1..=4u32 {
            for code in 0..4usize.pow(n) {
                let f: Vec<usize> = (0..n).map(|k| 2 + code / 4usize.pow(k) % 4).collect();
                let d = Dims::new(f.clone()).unwrap();
                let prod: usize = f.iter().product();
                let sum: usize = f.iter().map(|x| x - 1).sum();
                assert_eq!(max_entangled_dim(&d), prod - sum - 1);
                if d.total() <= 300 {
                    let cert = vandermonde_subspace::<f64>(&d, None).unwrap();
                    assert_eq!(cert.subspace.dim(), max_entangled_dim(&d), "{d}");
                }
            }
        }
    }

    #[test]
    fn kernel_matches_functionals() {
        for f in [&[2, 2][..], &[2, 3], &[3, 3], &[2, 2, 2], &[2, 3, 4]] {
            let d = dims(f);
            let cert = vandermonde_subspace::<f64>(&d, None).unwrap();
            let rows = vandermonde_functionals::<f64>(&d, &default_points(&d)).unwrap();
            let m = CMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
            assert_eq!(numerical_rank(&m, 1e-12), d.segre_dim());
            let report = orthonormal_report(&cert.subspace.columns(), 1e-12, false);
            assert!(report.pass);
            let annihilated = (&m * cert.subspace.basis()).norm();
            assert!(annihilated < 1e-9 * m.norm(), "{d}: {annihilated}");
            if d.total() <= 12 {
                let k = kernel_basis(&rows, d.total()).unwrap();
                assert!(k.projector_distance(&cert.subspace) < 1e-8);
            }
        }
    }

    #[test]
    fn product_values_factor() {
        let d = dims(&[2, 3]);
        let mut r = random::rng(1);
        let p = random::random_product_state::<f64, _>(&d, &mut r);
        let rows = vandermonde_functionals::<f64>(&d, &[0.5, -1.0, 2.0, 3.0]).unwrap();
        for (row, t) in rows.iter().zip([0.5f64, -1.0, 2.0, 3.0]) {
            let lhs = row.transpose() * p.expand();
            let rhs = p.factors().iter().fold(real(1.0), |acc, f| {
                acc * f
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .fold(real(0.0), |s, (i, z)| s + z * t.powi(i as i32))
            });
            assert!((lhs[0] - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn point_errors() {
        let d = dims(&[2, 2]);
        assert_eq!(
            vandermonde_subspace::<f64>(&d, Some(&[1.0, 1.0, 2.0])).unwrap_err(),
            Error::RepeatedPoints
        );
        assert!(matches!(
            vandermonde_subspace::<f64>(&d, Some(&[1.0, 2.0])),
            Err(Error::WrongPointCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn two_qubit_kernel_is_entangled() {
        let d = dims(&[2, 2]);
        let cert = vandermonde_subspace::<f64>(&d, Some(&[1.0, 2.0, 3.0])).unwrap();
        let v = cert.subspace.columns().remove(0);
        let det = v[0] * v[3] - v[1] * v[2];
        assert!(det.norm() > 0.1);
    }

    #[test]
    fn search_finds_product_ray() {
        let d = dims(&[2, 2]);
        let s = Subspace::new(4, &[kron(&[e(2, 0), e(2, 0)])]).unwrap();
        let rep = product_overlap_search(&d, &s, &quick(5, 0)).unwrap();
        assert!((rep.best_overlap - 1.0).abs() < 1e-12);
        let ov = rep.witness.expand().dotc(&kron(&[e(2, 0), e(2, 0)]));
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_overlap_is_schmidt_coefficient() {
        let d = dims(&[2, 2]);
        let bell = (kron(&[e(2, 0), e(2, 0)]) + kron(&[e(2, 1), e(2, 1)])).unscale(2f64.sqrt());
        let s = Subspace::new(4, &[bell]).unwrap();
        let rep = product_overlap_search(&d, &s, &quick(20, 1)).unwrap();
        assert!((rep.best_overlap - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(rep.max_trace_drop() < 1e-14);
    }

    #[test]
    fn exact_test_cases() {
        let d = dims(&[2, 2]);
        let bell = (kron(&[e(2, 0), e(2, 0)]) + kron(&[e(2, 1), e(2, 1)])).unscale(2f64.sqrt());
        let rep = exact_rank1_test_small(&d, &Subspace::new(4, &[bell]).unwrap()).unwrap();
        assert!(rep.witness.is_none());
        assert!((rep.residual - 0.5).abs() < 1e-12);

        for seed in 0..20 {
            let s = random_subspace::<f64>(&d, 2, seed).unwrap();
            let rep = exact_rank1_test_small(&d, &s).unwrap();
            let w = rep.witness.expect("every plane in (2,2) meets the cone");
            assert!((s.project(&w.expand()).norm() - 1.0).abs() < 1e-8);
        }

        let d23 = dims(&[2, 3]);
        let cert = vandermonde_subspace::<f64>(&d23, None).unwrap();
        let rep = exact_rank1_test_small(&d23, &cert.subspace).unwrap();
        assert!(rep.witness.is_none(), "residual {}", rep.residual);

        // every vector of e0 ⊗ span{e0, e1} is a product
        let s = Subspace::new(6, &[kron(&[e(2, 0), e(3, 0)]), kron(&[e(2, 0), e(3, 1)])]).unwrap();
        assert!(exact_rank1_test_small(&d23, &s).unwrap().witness.is_some());
        assert!(exact_rank1_test_small(&dims(&[3, 3]), &s).is_err());
    }

    #[test]
    fn quadratic_roots() {
        let c = |x: f64| Complex::new(x, 0.0);
        // (α − 2β)(α + 3β) = α² + αβ − 6β²
        let roots = binary_quadratic_roots(c(1.0), c(1.0), c(-6.0));
        let mut r: Vec<f64> = roots.iter().map(|(a, b)| (a / b).re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 3.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
        // β(α + β) has the root β = 0
        let roots = binary_quadratic_roots(c(0.0), c(1.0), c(1.0));
        assert!(roots.iter().any(|(_, b)| b.norm() < 1e-12));
    }

    #[test]
    fn search_agrees_with_exact_on_planted_product() {
        let d = dims(&[2, 3]);
        let mut r = random::rng(9);
        let p = random::random_product_state::<f64, _>(&d, &mut r).expand();
        let q = random::random_unit_vector::<f64, _>(6, &mut r);
        let s = Subspace::span(6, &[p, q]).unwrap();
        assert!(exact_rank1_test_small(&d, &s).unwrap().witness.is_some());
        let rep = product_overlap_search(&d, &s, &quick(30, 2)).unwrap();
        assert!(rep.best_overlap > 1.0 - 1e-6);
    }

    #[test]
    fn verdicts() {
        let policy = VerdictPolicy::default();
        let d = dims(&[3, 3]);
        let cert = vandermonde_subspace::<f64>(&d, None).unwrap();
        assert_eq!(cert_verdict(&cert, &policy), Verdict::CertifiedEntangled);
        let s = random_subspace::<f64>(&d, 5, 3).unwrap();
        let v = entangled_verdict(&d, &s, &VerdictPolicy { search: quick(30, 0), ..policy }).unwrap();
        assert_eq!(v.name(), "contains_product");
        let bell = (kron(&[e(2, 0), e(2, 0)]) + kron(&[e(2, 1), e(2, 1)])).unscale(2f64.sqrt());
        let v = entangled_verdict(&dims(&[2, 2]), &Subspace::new(4, &[bell]).unwrap(), &policy).unwrap();
        assert_eq!(v, Verdict::CertifiedEntangled);
    }

    #[test]
    fn search_is_unitarily_invariant() {
        let d = dims(&[2, 3]);
        let mut r = random::rng(11);
        let s = random_subspace::<f64>(&d, 2, 4).unwrap();
        let us: Vec<CMatrix<f64>> = d.factors().iter().map(|&k| random::random_unitary(k, &mut r)).collect();
        let u = crate::reconstruct::kron_unitaries(&us);
        let starts: Vec<ProductState<f64>> = (0..8)
            .map(|_| random::random_product_state(&d, &mut r))
            .collect();
        let moved: Vec<ProductState<f64>> = starts
            .iter()
            .map(|p| {
                ProductState::new(
                    p.factors()
                        .iter()
                        .zip(&us)
                        .map(|(f, u)| FactorState::from_unit_unchecked(u * f.amplitudes()))
                        .collect(),
                )
            })
            .collect();
        let opts = quick(8, 0);
        let a = product_overlap_search_from(&d, &s, &starts, &opts).unwrap();
        let b = product_overlap_search_from(&d, &s.transformed(&u), &moved, &opts).unwrap();
        assert!((a.best_overlap - b.best_overlap).abs() < 1e-9);
    }

    #[test]
    fn search_is_deterministic() {
        let d = dims(&[3, 3]);
        let s = random_subspace::<f64>(&d, 4, 5).unwrap();
        let a = product_overlap_search(&d, &s, &quick(16, 7)).unwrap();
        let b = product_overlap_search(&d, &s, &quick(16, 7)).unwrap();
        assert_eq!(a, b);
    }
}
