//! Product and unentangled orthonormal bases: generators, validation, and
//! the block decomposition of unentangled bases of `C^2 ⊗ C^n`.
//!
//! Every member of an unentangled basis of `C^2 ⊗ H` has the form `a ⊗ h`.
//! Grouping members by the ray of their qubit factor `a` gives classes that
//! pair up with the classes on the orthogonal ray `â`; paired classes have
//! equal size, and the second factors of the two classes span the same
//! subspace `U` of `H`. Peeling off one such pair leaves an unentangled
//! basis of `C^2 ⊗ U^⊥`, which is how [`decompose_qubit_basis`] proceeds.

use std::collections::HashSet;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::random::{self, rng, rng_stream};
use crate::scalar::{lit, Real};
use crate::tensor::{
    modulus, orthonormal_report, qubit_hat, CMatrix, CVector, Dims, FactorState,
    OrthonormalReport, ProductState, Subspace, DEFAULT_ORTHO_TOL,
};

/// Two qubit rays are the same when `|⟨a|b⟩| > 1 − RAY_EPS`.
pub const RAY_EPS: f64 = 1e-8;
/// Two qubit rays are orthogonal when `|⟨a|b⟩| < ORTH_EPS`.
pub const ORTH_EPS: f64 = 1e-8;
/// Ray matching threshold for [`is_product_basis`].
pub const PRODUCT_RAY_EPS: f64 = 1e-10;

/// `eps`, raised to ten times the unit tolerance for short scalar types.
fn scaled_eps<T: Real>(eps: f64) -> T {
    lit::<T>(eps).max(T::unit_tolerance() * lit(10.0))
}

/// Orthonormal basis of `H_1 ⊗ … ⊗ H_n` made of product states.
#[derive(Debug, Clone, PartialEq)]
pub struct UnentangledBasis<T: Real> {
    dims: Dims,
    members: Vec<ProductState<T>>,
}

impl<T: Real> UnentangledBasis<T> {
    /// Checks member dimensions and count; orthonormality is left to
    /// [`UnentangledBasis::validate`].
    pub fn new(dims: Dims, members: Vec<ProductState<T>>) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| m.dims() != &dims) {
            return Err(Error::DimensionMismatch {
                expected: dims.to_string(),
                found: m.dims().to_string(),
            });
        }
        if members.len() != dims.total() {
            return Err(Error::InvalidArgument(format!(
                "{} members for a space of dimension {}",
                members.len(),
                dims.total()
            )));
        }
        Ok(Self { dims, members })
    }

    /// [`UnentangledBasis::new`] plus an orthonormality check at `tol`.
    pub fn validated(dims: Dims, members: Vec<ProductState<T>>, tol: T) -> Result<Self> {
        let basis = Self::new(dims, members)?;
        let report = basis.validate(tol);
        if !report.pass {
            return Err(Error::NotOrthonormal(report.max_deviation.as_f64()));
        }
        Ok(basis)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn members(&self) -> &[ProductState<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vectors(&self) -> Vec<CVector<T>> {
        self.members.iter().map(ProductState::expand).collect()
    }

    pub fn validate(&self, tol: T) -> OrthonormalReport<T> {
        orthonormal_report(&self.vectors(), tol, true)
    }
}

fn unitary_columns<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<CVector<T>> {
    random::random_unitary::<T, R>(d, rng)
        .column_iter()
        .map(|c| c.into_owned())
        .collect()
}

fn factor<T: Real>(v: CVector<T>) -> FactorState<T> {
    FactorState::from_unit_unchecked(v)
}

/// All tensor combinations of one Haar-random orthonormal basis per factor,
/// in lexicographic order.
pub fn random_product_basis<T: Real>(dims: &Dims, seed: u64) -> UnentangledBasis<T> {
    let mut rng = rng(seed);
    let per_factor: Vec<Vec<CVector<T>>> = dims
        .factors()
        .iter()
        .map(|&d| unitary_columns(d, &mut rng))
        .collect();
    let members = (0..dims.total())
        .map(|flat| {
            let idx = dims.multi_index(flat);
            ProductState::new(
                idx.iter()
                    .zip(&per_factor)
                    .map(|(&i, basis)| factor(basis[i].clone()))
                    .collect(),
            )
        })
        .collect();
    UnentangledBasis {
        dims: dims.clone(),
        members,
    }
}

/// Members of an unentangled basis over `positions` (indices into the
/// factor list), each given as one vector per position.
fn mixed_members<T: Real, R: Rng + ?Sized>(
    factors: &[usize],
    positions: &[usize],
    root: Option<usize>,
    rng: &mut R,
) -> Vec<Vec<CVector<T>>> {
    if positions.len() == 1 {
        return unitary_columns(factors[positions[0]], rng)
            .into_iter()
            .map(|v| vec![v])
            .collect();
    }
    let slot = match root {
        Some(r) => positions.iter().position(|&p| p == r).unwrap(),
        None => rng.random_range(0..positions.len()),
    };
    let rest: Vec<usize> = positions
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != slot)
        .map(|(_, &p)| p)
        .collect();
    let mut out = Vec::new();
    for v in unitary_columns::<T, R>(factors[positions[slot]], rng) {
        for mut member in mixed_members(factors, &rest, None, rng) {
            member.insert(slot, v.clone());
            out.push(member);
        }
    }
    out
}

fn assemble_mixed<T: Real>(dims: &Dims, root: Option<usize>, seed: u64) -> UnentangledBasis<T> {
    let mut rng = rng(seed);
    let positions: Vec<usize> = (0..dims.len()).collect();
    let mut members: Vec<ProductState<T>> =
        mixed_members(dims.factors(), &positions, root, &mut rng)
            .into_iter()
            .map(|m| ProductState::new(m.into_iter().map(factor).collect()))
            .collect();
    random::shuffle(&mut members, &mut rng);
    UnentangledBasis {
        dims: dims.clone(),
        members,
    }
}

/// Recursive unentangled basis `{v_i ⊗ u_ij}`: pick a random factor, a
/// random orthonormal basis `{v_i}` of it, and for every `i` an independent
/// unentangled basis `{u_ij}` of the remaining factors. Output is shuffled.
pub fn mixed_unentangled_basis<T: Real>(dims: &Dims, seed: u64) -> UnentangledBasis<T> {
    assemble_mixed(dims, None, seed)
}

/// As [`mixed_unentangled_basis`] but with the outermost split forced on
/// factor `root`. For two factors and `root = 1` this gives the bases
/// `{u_ij ⊗ v_i}`: one basis `{v_i}` of the second factor and a separate
/// first-factor basis for each `i`.
pub fn reversed_structure_basis<T: Real>(
    dims: &Dims,
    root: usize,
    seed: u64,
) -> Result<UnentangledBasis<T>> {
    if root >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "root factor {root} out of range for {dims}"
        )));
    }
    Ok(assemble_mixed(dims, Some(root), seed))
}

/// Checks that `partition` is positive, nonincreasing and sums to `n`.
pub fn check_partition(n: usize, partition: &[usize]) -> Result<()> {
    let ok = !partition.is_empty()
        && partition.iter().all(|&p| p > 0)
        && partition.windows(2).all(|w| w[0] >= w[1])
        && partition.iter().sum::<usize>() == n;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidPartition {
            partition: partition.to_vec(),
            n,
        })
    }
}

/// Every partition of `n` in nonincreasing form, in reverse lexicographic
/// order (`[n]` first).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Uniform choice among the partitions of `n`.
pub fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let all = partitions(n);
    all[rng.random_range(0..all.len())].clone()
}

/// Options for [`qubit_block_basis_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitBlockOptions {
    /// Use the same orthonormal basis of `U_i` for the `a_i` and `â_i` halves.
    pub shared_bc: bool,
    /// Shuffle members and give each a random phase.
    pub scramble: bool,
}

impl Default for QubitBlockOptions {
    fn default() -> Self {
        Self {
            shared_bc: false,
            scramble: true,
        }
    }
}

/// Random unentangled basis of `C^2 ⊗ C^n` with prescribed block structure:
/// a random orthogonal decomposition `C^n = ⊕ U_i`, `dim U_i = partition[i]`,
/// a random qubit `a_i` per block, and independent random orthonormal bases
/// `b_i·`, `c_i·` of `U_i`; members are `a_i ⊗ b_ij` and `â_i ⊗ c_ij`.
pub fn qubit_block_basis<T: Real>(
    n: usize,
    partition: &[usize],
    seed: u64,
) -> Result<UnentangledBasis<T>> {
    qubit_block_basis_with(n, partition, seed, QubitBlockOptions::default())
}

pub fn qubit_block_basis_with<T: Real>(
    n: usize,
    partition: &[usize],
    seed: u64,
    opts: QubitBlockOptions,
) -> Result<UnentangledBasis<T>> {
    check_partition(n, partition)?;
    let dims = Dims::qubit_pair(n)?;
    let mut rng = rng(seed);
    let frame = random::random_unitary::<T, _>(n, &mut rng);
    let mut members = Vec::with_capacity(2 * n);
    let mut offset = 0;
    for &size in partition {
        let block = frame.columns(offset, size).into_owned();
        offset += size;
        let a: FactorState<T> = random::random_factor_state(2, &mut rng);
        let hat = qubit_hat(&a)?;
        let b = &block * random::random_unitary::<T, _>(size, &mut rng);
        let c = if opts.shared_bc {
            b.clone()
        } else {
            &block * random::random_unitary::<T, _>(size, &mut rng)
        };
        for col in b.column_iter() {
            members.push(ProductState::new(vec![a.clone(), factor(col.into_owned())]));
        }
        for col in c.column_iter() {
            members.push(ProductState::new(vec![hat.clone(), factor(col.into_owned())]));
        }
    }
    if opts.scramble {
        for m in members.iter_mut() {
            *m = m.with_phase(random::random_phase(&mut rng));
        }
        random::shuffle(&mut members, &mut rng);
    }
    Ok(UnentangledBasis { dims, members })
}

/// Unentangled basis of `C^2 ⊗ K` with `K = H_2 ⊗ … ⊗ H_n` a multi-factor
/// product space, built with the same block shape as [`qubit_block_basis`]
/// while keeping every second factor a product state.
///
/// A random product basis of `K` is cut into lines along a random factor
/// `k` (members agreeing off factor `k`); each line spans `x ⊗ H_k ⊗ y`,
/// which also has the rotated product basis `x ⊗ (V u_j) ⊗ y`. Lines are
/// merged into blocks at random, each block gets its own qubit `a_i`, and
/// the `â_i` half uses the rotated bases.
pub fn qubit_block_product_tail<T: Real>(tail: &Dims, seed: u64) -> UnentangledBasis<T> {
    let mut rng = rng(seed);
    let dims = tail.with_leading(2);
    let k = rng.random_range(0..tail.len());
    let per_factor: Vec<Vec<CVector<T>>> = tail
        .factors()
        .iter()
        .map(|&d| unitary_columns(d, &mut rng))
        .collect();
    let dk = tail.factors()[k];
    let line_count = tail.total() / dk;
    // multi-index of factors other than k
    let mut other = tail.factors().to_vec();
    other.remove(k);
    let lines: Vec<Vec<usize>> = (0..line_count)
        .map(|l| {
            let mut idx = Vec::with_capacity(other.len());
            let mut rem = l;
            for &d in other.iter().rev() {
                idx.push(rem % d);
                rem /= d;
            }
            idx.reverse();
            idx
        })
        .collect();
    let mut order: Vec<usize> = (0..line_count).collect();
    random::shuffle(&mut order, &mut rng);
    let sizes = random_partition(line_count, &mut rng);

    let build = |line: &[usize], vk: &CVector<T>| -> Vec<FactorState<T>> {
        let mut fs = Vec::with_capacity(tail.len());
        let mut it = line.iter();
        for (j, basis) in per_factor.iter().enumerate() {
            if j == k {
                fs.push(factor(vk.clone()));
            } else {
                fs.push(factor(basis[*it.next().unwrap()].clone()));
            }
        }
        fs
    };

    let mut members = Vec::with_capacity(dims.total());
    let mut cursor = 0;
    for size in sizes {
        let a: FactorState<T> = random::random_factor_state(2, &mut rng);
        let hat = qubit_hat(&a).unwrap();
        for &l in &order[cursor..cursor + size] {
            let rot = random::random_unitary::<T, _>(dk, &mut rng);
            let base = CMatrix::from_columns(&per_factor[k]);
            let rotated = &base * rot;
            for u in &per_factor[k] {
                let mut fs = vec![a.clone()];
                fs.extend(build(&lines[l], u));
                members.push(ProductState::new(fs));
            }
            for col in rotated.column_iter() {
                let mut fs = vec![hat.clone()];
                fs.extend(build(&lines[l], &col.into_owned()));
                members.push(ProductState::new(fs));
            }
        }
        cursor += size;
    }
    for m in members.iter_mut() {
        *m = m.with_phase(random::random_phase(&mut rng));
    }
    random::shuffle(&mut members, &mut rng);
    UnentangledBasis { dims, members }
}

/// One block of a [`BasisBlockDecomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct QubitBlock<T: Real> {
    pub a: FactorState<T>,
    pub hat_a: FactorState<T>,
    /// Orthonormal basis of `U` paired with `a`.
    pub b_list: Vec<CVector<T>>,
    /// Orthonormal basis of `U` paired with `â`.
    pub c_list: Vec<CVector<T>>,
    pub subspace: Subspace<T>,
    /// Input member index of each `a ⊗ b_j`.
    pub b_sources: Vec<usize>,
    /// Input member index of each `â ⊗ c_j`.
    pub c_sources: Vec<usize>,
}

impl<T: Real> QubitBlock<T> {
    pub fn size(&self) -> usize {
        self.b_list.len()
    }

    /// `a ⊗ b_j` followed by `â ⊗ c_j`.
    pub fn members(&self) -> Vec<ProductState<T>> {
        let with = |q: &FactorState<T>, v: &CVector<T>| {
            ProductState::new(vec![q.clone(), factor(v.clone())])
        };
        self.b_list
            .iter()
            .map(|b| with(&self.a, b))
            .chain(self.c_list.iter().map(|c| with(&self.hat_a, c)))
            .collect()
    }
}

/// Partition `n_1 ≥ … ≥ n_r` of `n` with one block per part.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisBlockDecomposition<T: Real> {
    pub partition: Vec<usize>,
    pub blocks: Vec<QubitBlock<T>>,
}

impl<T: Real> BasisBlockDecomposition<T> {
    /// `max_i | 1 − |⟨block member | input member⟩| |` over all members.
    pub fn reconstruction_error(&self, basis: &UnentangledBasis<T>) -> T {
        let mut worst = T::zero();
        for block in &self.blocks {
            let sources = block.b_sources.iter().chain(&block.c_sources);
            for (m, &src) in block.members().iter().zip(sources) {
                let o = modulus(m.expand().dotc(&basis.members()[src].expand()));
                worst = worst.max((T::one() - o).abs());
            }
        }
        worst
    }
}

fn violation(observation: &'static str, detail: String) -> Error {
    Error::StructureViolation {
        observation,
        detail,
    }
}

/// Unit scalar with the phase of `z`.
fn phase_of<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = modulus(z);
    Complex::new(z.re / m, z.im / m)
}

/// Recovers the block structure of an unentangled basis of `C^2 ⊗ C^n`.
///
/// `tol` is the basis tolerance (orthonormality, span equality and the
/// orthogonality of later second factors to each block). Qubit rays are
/// compared against the fixed [`RAY_EPS`] / [`ORTH_EPS`] thresholds; a
/// pair of members whose qubit factors are neither on the same ray nor
/// orthogonal must have orthogonal second factors.
pub fn decompose_qubit_basis<T: Real>(
    basis: &UnentangledBasis<T>,
    tol: T,
) -> Result<BasisBlockDecomposition<T>> {
    let dims = basis.dims();
    if dims.len() != 2 || dims.factors()[0] != 2 {
        return Err(Error::NotQubitFirstFactor(dims.to_string()));
    }
    let n = dims.factors()[1];
    let report = basis.validate(tol);
    if basis.len() != 2 * n || !report.pass {
        return Err(Error::NotOrthonormal(report.max_deviation.as_f64()));
    }

    let qubits: Vec<&CVector<T>> = basis
        .members()
        .iter()
        .map(|m| m.factor(0).amplitudes())
        .collect();
    let seconds: Vec<&CVector<T>> = basis
        .members()
        .iter()
        .map(|m| m.factor(1).amplitudes())
        .collect();
    let same: T = T::one() - scaled_eps(RAY_EPS);
    let orth: T = scaled_eps(ORTH_EPS);

    // qubit-ray classes, in order of first appearance
    let mut class_of = vec![usize::MAX; basis.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..basis.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![i];
        class_of[i] = id;
        for j in i + 1..basis.len() {
            if class_of[j] == usize::MAX && modulus(qubits[i].dotc(qubits[j])) > same {
                class_of[j] = id;
                members.push(j);
            }
        }
        classes.push(members);
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let s = modulus(qubits[i].dotc(qubits[j]));
            if class_of[i] == class_of[j] {
                if s <= same {
                    return Err(violation(
                        "ray classes",
                        format!("members {i} and {j} share a class but |<a_i|a_j>| = {}", s.as_f64()),
                    ));
                }
            } else if s >= orth {
                if s > same {
                    return Err(violation(
                        "ray classes",
                        format!("members {i} and {j} on one ray in different classes"),
                    ));
                }
                // observation 2: non-orthogonal qubits force orthogonal second factors
                let h = modulus(seconds[i].dotc(seconds[j]));
                if h * s > tol {
                    return Err(violation(
                        "observation 2",
                        format!(
                            "members {i}, {j}: |<a_i|a_j>| = {}, |<h_i|h_j>| = {}",
                            s.as_f64(),
                            h.as_f64()
                        ),
                    ));
                }
            }
        }
    }

    let mut active = vec![true; classes.len()];
    let mut blocks: Vec<QubitBlock<T>> = Vec::new();
    while let Some(first) = (0..classes.len())
        .filter(|&c| active[c])
        .max_by(|&x, &y| classes[x].len().cmp(&classes[y].len()).then(y.cmp(&x)))
    {
        let m = classes[first].len();
        let rep = qubits[classes[first][0]];
        let partner = (0..classes.len())
            .filter(|&c| active[c] && c != first)
            .find(|&c| modulus(rep.dotc(qubits[classes[c][0]])) < orth)
            .ok_or_else(|| {
                violation(
                    "observation 1",
                    format!("no class on the ray orthogonal to member {}", classes[first][0]),
                )
            })?;
        let k = classes[partner].len();
        if k != m {
            return Err(violation(
                "class sizes",
                format!("class of size {m} paired with orthogonal class of size {k}"),
            ));
        }

        let a = FactorState::from_unit_unchecked(rep.clone()).phase_normalized();
        let hat = qubit_hat(&a)?;
        // u_j = a_j ⊗ h_j = a ⊗ (⟨a|a_j⟩ h_j) when a_j lies on the ray of a
        let align = |q: &FactorState<T>, members: &[usize]| -> Vec<CVector<T>> {
            members
                .iter()
                .map(|&j| {
                    let lambda = phase_of(q.amplitudes().dotc(qubits[j]));
                    let v = seconds[j] * lambda;
                    factor(v).phase_normalized().into_amplitudes()
                })
                .collect()
        };
        let b_list = align(&a, &classes[first]);
        let c_list = align(&hat, &classes[partner]);
        for (name, list) in [("b", &b_list), ("c", &c_list)] {
            let r = orthonormal_report(list, tol, false);
            if !r.pass {
                return Err(violation(
                    "block orthonormality",
                    format!("{name}_list deviation {}", r.max_deviation.as_f64()),
                ));
            }
        }
        let ub = Subspace::from_basis_unchecked(n, &b_list);
        let uc = Subspace::from_basis_unchecked(n, &c_list);
        let dist = ub.projector_distance(&uc);
        if dist > tol {
            return Err(violation(
                "span equality",
                format!("span(b) and span(c) differ by {}", dist.as_f64()),
            ));
        }
        active[first] = false;
        active[partner] = false;
        for c in (0..classes.len()).filter(|&c| active[c]) {
            for &j in &classes[c] {
                let leak = crate::tensor::vec_norm(&ub.project(seconds[j]));
                if leak > tol {
                    return Err(violation(
                        "complement",
                        format!("member {j} has component {} in block subspace", leak.as_f64()),
                    ));
                }
            }
        }
        blocks.push(QubitBlock {
            a,
            hat_a: hat,
            b_list,
            c_list,
            subspace: ub,
            b_sources: classes[first].clone(),
            c_sources: classes[partner].clone(),
        });
    }
    // stable: ties keep discovery order
    blocks.sort_by_key(|b| std::cmp::Reverse(b.size()));
    Ok(BasisBlockDecomposition {
        partition: blocks.iter().map(QubitBlock::size).collect(),
        blocks,
    })
}

/// Decomposition with the default basis tolerance 1e-10.
pub fn decompose_qubit_basis_default<T: Real>(
    basis: &UnentangledBasis<T>,
) -> Result<BasisBlockDecomposition<T>> {
    decompose_qubit_basis(basis, lit(DEFAULT_ORTHO_TOL))
}

/// Whether `basis` is a product basis: each factor shows exactly `d_j`
/// distinct rays and the members realize every combination of them.
pub fn is_product_basis<T: Real>(basis: &UnentangledBasis<T>) -> bool {
    let same: T = T::one() - scaled_eps(PRODUCT_RAY_EPS);
    let dims = basis.dims();
    let mut labels = vec![Vec::with_capacity(dims.len()); basis.len()];
    for (j, &d) in dims.factors().iter().enumerate() {
        let mut reps: Vec<&CVector<T>> = Vec::new();
        for (i, m) in basis.members().iter().enumerate() {
            let v = m.factor(j).amplitudes();
            let label = match reps.iter().position(|r| modulus(r.dotc(v)) > same) {
                Some(l) => l,
                None => {
                    reps.push(v);
                    reps.len() - 1
                }
            };
            labels[i].push(label);
        }
        if reps.len() != d {
            return false;
        }
    }
    let distinct: HashSet<&Vec<usize>> = labels.iter().collect();
    distinct.len() == dims.total() && basis.len() == dims.total()
}

/// Streams of bases used by frame verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Product,
    Mixed,
    /// Block-structured bases over a qubit first factor; random partition
    /// for `(2, n)`, product-tail construction for more factors.
    QubitBlock,
    /// `{u_ij ⊗ v_i}`-type bases with the outer split on the last factor.
    Reversed,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 4] = [
        BasisFamily::Product,
        BasisFamily::Mixed,
        BasisFamily::QubitBlock,
        BasisFamily::Reversed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::Product => "product",
            BasisFamily::Mixed => "mixed",
            BasisFamily::QubitBlock => "qubit-block",
            BasisFamily::Reversed => "reversed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown basis family {s:?}")))
    }

    /// Whether the family can produce bases of `dims`.
    pub fn supports(self, dims: &Dims) -> bool {
        match self {
            BasisFamily::QubitBlock => dims.len() >= 2 && dims.factors()[0] == 2,
            BasisFamily::Reversed => dims.len() >= 2,
            _ => true,
        }
    }

    /// Basis number `index` of the stream for `seed`.
    pub fn sample<T: Real>(self, dims: &Dims, seed: u64, index: u64) -> Result<UnentangledBasis<T>> {
        if !self.supports(dims) {
            return Err(Error::UnsupportedDims(format!("{} for {}", dims, self.name())));
        }
        let sub: u64 = rng_stream(seed, index).random();
        match self {
            BasisFamily::Product => Ok(random_product_basis(dims, sub)),
            BasisFamily::Mixed => Ok(mixed_unentangled_basis(dims, sub)),
            BasisFamily::Reversed => reversed_structure_basis(dims, dims.len() - 1, sub),
            BasisFamily::QubitBlock => {
                let tail = dims.tail().unwrap();
                if tail.len() == 1 {
                    let n = tail.total();
                    let partition = random_partition(n, &mut rng(sub));
                    qubit_block_basis(n, &partition, sub.wrapping_add(1))
                } else {
                    Ok(qubit_block_product_tail(&tail, sub))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(f: &[usize]) -> Dims {
        Dims::new(f.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn fs(v: &[Complex<f64>]) -> FactorState<f64> {
        FactorState::new(CVector::from_row_slice(v)).unwrap()
    }

    /// `{e0⊗e0, e0⊗e1, e1⊗f0, e1⊗f1}` with `f± = (e0 ± e1)/√2`.
    fn mixed_2x2() -> UnentangledBasis<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e0 = fs(&[c(1., 0.), c(0., 0.)]);
        let e1 = fs(&[c(0., 0.), c(1., 0.)]);
        let f0 = fs(&[c(s, 0.), c(s, 0.)]);
        let f1 = fs(&[c(s, 0.), c(-s, 0.)]);
        let members = vec![
            ProductState::new(vec![e0.clone(), e0.clone()]),
            ProductState::new(vec![e0.clone(), e1.clone()]),
            ProductState::new(vec![e1.clone(), f0]),
            ProductState::new(vec![e1, f1]),
        ];
        UnentangledBasis::validated(dims(&[2, 2]), members, 1e-10).unwrap()
    }

    #[test]
    fn product_basis_sizes_and_validity() {
        let b = random_product_basis::<f64>(&dims(&[2, 2]), 1);
        assert_eq!(b.len(), 4);
        assert!(b.validate(1e-10).pass);
        let b = random_product_basis::<f64>(&dims(&[3, 3]), 2);
        assert_eq!(b.len(), 9);
        assert!(b.members().iter().all(|m| m.factors().len() == 2));
        assert!(is_product_basis(&b));
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let d = dims(&[2, 3]);
        assert_eq!(random_product_basis::<f64>(&d, 9), random_product_basis::<f64>(&d, 9));
        assert_eq!(mixed_unentangled_basis::<f64>(&d, 9), mixed_unentangled_basis::<f64>(&d, 9));
        assert_ne!(mixed_unentangled_basis::<f64>(&d, 9), mixed_unentangled_basis::<f64>(&d, 10));
        assert_eq!(
            qubit_block_basis::<f64>(3, &[2, 1], 4).unwrap(),
            qubit_block_basis::<f64>(3, &[2, 1], 4).unwrap()
        );
    }

    #[test]
    fn mixed_example_is_unentangled_but_not_product() {
        let b = mixed_2x2();
        assert!(!is_product_basis(&b));
    }

    #[test]
    fn mixed_generator_is_orthonormal_everywhere() {
        for f in [&[2, 2][..], &[2, 3], &[3, 3], &[2, 2, 2], &[3, 2, 2], &[3, 3, 3]] {
            for seed in 0..20 {
                let b = mixed_unentangled_basis::<f64>(&dims(f), seed);
                assert!(b.validate(1e-10).pass, "{f:?} seed {seed}");
            }
        }
    }

    #[test]
    fn mixed_3x3_is_rarely_a_product_basis() {
        let d = dims(&[3, 3]);
        let non_product = (0..100)
            .filter(|&s| !is_product_basis(&mixed_unentangled_basis::<f64>(&d, s)))
            .count();
        assert!(non_product >= 90, "{non_product}");
    }

    #[test]
    fn reversed_structure_shares_second_factor_rays() {
        let b = reversed_structure_basis::<f64>(&dims(&[3, 3]), 1, 3).unwrap();
        assert!(b.validate(1e-10).pass);
        // three distinct second-factor rays, each used three times
        let mut rays: Vec<CVector<f64>> = Vec::new();
        for m in b.members() {
            let v = m.factor(1).amplitudes();
            if !rays.iter().any(|r| (r.dotc(v).norm() - 1.0).abs() < 1e-10) {
                rays.push(v.clone());
            }
        }
        assert_eq!(rays.len(), 3);
        assert!(reversed_structure_basis::<f64>(&dims(&[3, 3]), 2, 3).is_err());
    }

    #[test]
    fn partitions_enumerate() {
        assert_eq!(partitions(1), vec![vec![1]]);
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(6).len(), 11);
        for p in partitions(6) {
            check_partition(6, &p).unwrap();
        }
        assert!(check_partition(3, &[1, 2]).is_err());
        assert!(check_partition(3, &[2, 2]).is_err());
        assert!(check_partition(3, &[3, 0]).is_err());
    }

    #[test]
    fn qubit_block_small_cases() {
        let b = qubit_block_basis::<f64>(1, &[1], 0).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.validate(1e-10).pass);
        let b = qubit_block_basis::<f64>(3, &[2, 1], 0).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.validate(1e-10).pass);
        assert!(matches!(
            qubit_block_basis::<f64>(3, &[2, 2], 0),
            Err(Error::InvalidPartition { .. })
        ));
    }

    #[test]
    fn single_block_with_shared_bases_is_a_product_basis() {
        for n in 2..6 {
            let opts = QubitBlockOptions {
                shared_bc: true,
                scramble: true,
            };
            let b = qubit_block_basis_with::<f64>(n, &[n], n as u64, opts).unwrap();
            assert!(is_product_basis(&b));
            let b = qubit_block_basis::<f64>(n, &[n], n as u64).unwrap();
            assert!(!is_product_basis(&b));
        }
    }

    #[test]
    fn decomposes_the_mixed_example() {
        let d = decompose_qubit_basis(&mixed_2x2(), 1e-10).unwrap();
        assert_eq!(d.partition, vec![2]);
        let block = &d.blocks[0];
        assert!((block.a.amplitudes()[0] - c(1., 0.)).norm() < 1e-15);
        let e = |k: usize| {
            let mut v = CVector::<f64>::zeros(2);
            v[k] = c(1., 0.);
            v
        };
        assert!((block.b_list[0].dotc(&e(0)).norm() - 1.0).abs() < 1e-12);
        assert!((block.b_list[1].dotc(&e(1)).norm() - 1.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((block.c_list[0][0] - c(s, 0.)).norm() < 1e-12);
        assert!((block.c_list[0][1] - c(s, 0.)).norm() < 1e-12);
        assert!(d.reconstruction_error(&mixed_2x2()) < 1e-12);
    }

    #[test]
    fn round_trips_every_partition() {
        for n in 1..=6 {
            for p in partitions(n) {
                for seed in 0..5 {
                    let b = qubit_block_basis::<f64>(n, &p, seed).unwrap();
                    let d = decompose_qubit_basis(&b, 1e-10).unwrap();
                    assert_eq!(d.partition, p, "n={n} seed={seed}");
                    assert!(d.reconstruction_error(&b) < 1e-9);
                    for block in &d.blocks {
                        assert!(modulus(block.a.amplitudes().dotc(block.hat_a.amplitudes())) < 1e-10);
                    }
                    // U_i pairwise orthogonal and summing to C^n
                    let total: CMatrix<f64> =
                        d.blocks.iter().map(|b| b.subspace.projector()).sum();
                    assert!((total - CMatrix::identity(n, n)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_non_orthonormal_input() {
        let mut members = mixed_2x2().members().to_vec();
        members[3] = members[2].clone();
        let b = UnentangledBasis::new(dims(&[2, 2]), members).unwrap();
        assert!(matches!(decompose_qubit_basis(&b, 1e-10), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn rejects_non_qubit_first_factor() {
        let b = random_product_basis::<f64>(&dims(&[3, 2]), 0);
        assert!(matches!(
            decompose_qubit_basis(&b, 1e-10),
            Err(Error::NotQubitFirstFactor(_))
        ));
    }

    #[test]
    fn product_tail_bases_are_valid_and_decompose_over_the_tail() {
        for f in [&[2, 2][..], &[3, 3], &[2, 3]] {
            for seed in 0..10 {
                let b = qubit_block_product_tail::<f64>(&dims(f), seed);
                assert!(b.validate(1e-10).pass);
                // flatten the tail to a single factor and decompose
                let n = dims(f).total();
                let flat: Vec<ProductState<f64>> = b
                    .members()
                    .iter()
                    .map(|m| {
                        let tail = m.tail().unwrap().expand();
                        ProductState::new(vec![m.factor(0).clone(), factor(tail)])
                    })
                    .collect();
                let flat = UnentangledBasis::new(Dims::qubit_pair(n).unwrap(), flat).unwrap();
                let d = decompose_qubit_basis(&flat, 1e-10).unwrap();
                assert_eq!(d.partition.iter().sum::<usize>(), n);
            }
        }
    }

    #[test]
    fn observation_two_holds_pairwise() {
        let mut rng = rng(77);
        for _ in 0..50 {
            let n = rng.random_range(1..=5);
            let p = random_partition(n, &mut rng);
            let b = qubit_block_basis::<f64>(n, &p, rng.random()).unwrap();
            let m = b.members();
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    let s = modulus(m[i].factor(0).amplitudes().dotc(m[j].factor(0).amplitudes()));
                    let h = modulus(m[i].factor(1).amplitudes().dotc(m[j].factor(1).amplitudes()));
                    if s > 1e-8 {
                        assert!(h < 1e-8 || s > 1.0 - 1e-8, "s={s} h={h}");
                    }
                }
                // observation 1: some member sits on the orthogonal ray
                let hat = qubit_hat(m[i].factor(0)).unwrap();
                assert!((0..m.len()).any(|j| {
                    (modulus(hat.amplitudes().dotc(m[j].factor(0).amplitudes())) - 1.0).abs() < 1e-8
                }));
            }
        }
    }

    #[test]
    fn family_streams() {
        let d = dims(&[2, 3]);
        for fam in BasisFamily::ALL {
            let b = fam.sample::<f64>(&d, 5, 3).unwrap();
            assert!(b.validate(1e-10).pass, "{}", fam.name());
            assert_eq!(b, fam.sample::<f64>(&d, 5, 3).unwrap());
        }
        assert!(BasisFamily::QubitBlock.sample::<f64>(&dims(&[3, 3]), 0, 0).is_err());
        let b = BasisFamily::QubitBlock.sample::<f64>(&dims(&[2, 2, 2]), 0, 0).unwrap();
        assert!(b.validate(1e-10).pass);
    }
}
