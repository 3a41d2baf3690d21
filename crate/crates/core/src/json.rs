//! JSON encodings of the library's values, fixed to `f64`.
//!
//! A complex scalar is `[re, im]`, a vector is a list of those, an operator
//! is a row-major list of rows. Struct fields serialize in declaration
//! order and floats use the shortest representation that round-trips, so
//! equal values always produce equal bytes. Every `to_*` conversion
//! re-validates what it reads.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bases::{BasisBlockDecomposition, QubitBlock, UnentangledBasis};
use crate::error::{Error, Result};
use crate::frames::{
    born_oracle, counterexample_oracle, product_frame_oracle, FrameOracle, FrameReport,
    MixtureOracle, OddPart, PsiMap, QubitFrameFn,
};
use crate::reconstruct::{FitReport, Reconstruction};
use crate::subspaces::{
    Certificate, Construction, EntangledSubspaceCert, ExactReport, SearchReport,
};
use crate::tensor::{CMatrix, CVector, Dims, FactorState, HermitianOp, ProductState, Subspace};
use crate::Complex;

pub type ComplexJson = [f64; 2];
pub type VectorJson = Vec<ComplexJson>;
pub type OperatorJson = Vec<Vec<ComplexJson>>;

pub fn to_string<V: Serialize>(value: &V) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_str<V: DeserializeOwned>(s: &str) -> Result<V> {
    Ok(serde_json::from_str(s)?)
}

pub fn vector_json(v: &CVector<f64>) -> VectorJson {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &[ComplexJson]) -> Result<CVector<f64>> {
    if v.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Json("non-finite entry".into()));
    }
    Ok(CVector::from_iterator(
        v.len(),
        v.iter().map(|z| Complex::new(z[0], z[1])),
    ))
}

pub fn operator_json(m: &CMatrix<f64>) -> OperatorJson {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<ComplexJson>]) -> Result<CMatrix<f64>> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch(n, r.len()));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in vector_from_json(row)?.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    Ok(m)
}

pub fn operator_from_json(rows: &[Vec<ComplexJson>]) -> Result<HermitianOp<f64>> {
    HermitianOp::new(matrix_from_json(rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductStateJson {
    pub dims: Vec<usize>,
    pub factors: Vec<VectorJson>,
}

impl ProductStateJson {
    pub fn from_state(p: &ProductState<f64>) -> Self {
        Self {
            dims: p.dims().factors().to_vec(),
            factors: p.factors().iter().map(|f| vector_json(f.amplitudes())).collect(),
        }
    }

    pub fn to_state(&self) -> Result<ProductState<f64>> {
        let factors = self
            .factors
            .iter()
            .map(|f| FactorState::new(vector_from_json(f)?))
            .collect::<Result<Vec<_>>>()?;
        ProductState::with_dims(&Dims::new(self.dims.clone())?, factors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub dims: Vec<usize>,
    pub members: Vec<ProductStateJson>,
}

impl BasisJson {
    pub fn from_basis(b: &UnentangledBasis<f64>) -> Self {
        Self {
            dims: b.dims().factors().to_vec(),
            members: b.members().iter().map(ProductStateJson::from_state).collect(),
        }
    }

    /// Parses members and checks dimensions and count; orthonormality is
    /// left to the caller so that invalid bases can still be reported on.
    pub fn to_basis(&self) -> Result<UnentangledBasis<f64>> {
        let members = self
            .members
            .iter()
            .map(ProductStateJson::to_state)
            .collect::<Result<Vec<_>>>()?;
        UnentangledBasis::new(Dims::new(self.dims.clone())?, members)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient: usize,
    pub columns: Vec<VectorJson>,
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace<f64>) -> Self {
        Self {
            ambient: s.ambient(),
            columns: s.columns().iter().map(vector_json).collect(),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace<f64>> {
        let cols = self
            .columns
            .iter()
            .map(|c| vector_from_json(c))
            .collect::<Result<Vec<_>>>()?;
        Subspace::new(self.ambient, &cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub a: VectorJson,
    pub hat_a: VectorJson,
    pub b_list: Vec<VectorJson>,
    pub c_list: Vec<VectorJson>,
    pub subspace: SubspaceJson,
    pub b_sources: Vec<usize>,
    pub c_sources: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub partition: Vec<usize>,
    pub reconstruction_error: f64,
    pub blocks: Vec<BlockJson>,
}

impl DecompositionJson {
    pub fn from_decomposition(d: &BasisBlockDecomposition<f64>, basis: &UnentangledBasis<f64>) -> Self {
        Self {
            partition: d.partition.clone(),
            reconstruction_error: d.reconstruction_error(basis),
            blocks: d
                .blocks
                .iter()
                .map(|b| BlockJson {
                    a: vector_json(b.a.amplitudes()),
                    hat_a: vector_json(b.hat_a.amplitudes()),
                    b_list: b.b_list.iter().map(vector_json).collect(),
                    c_list: b.c_list.iter().map(vector_json).collect(),
                    subspace: SubspaceJson::from_subspace(&b.subspace),
                    b_sources: b.b_sources.clone(),
                    c_sources: b.c_sources.clone(),
                })
                .collect(),
        }
    }

    pub fn to_decomposition(&self) -> Result<BasisBlockDecomposition<f64>> {
        let vecs = |l: &[VectorJson]| l.iter().map(|v| vector_from_json(v)).collect::<Result<Vec<_>>>();
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                Ok(QubitBlock {
                    a: FactorState::new(vector_from_json(&b.a)?)?,
                    hat_a: FactorState::new(vector_from_json(&b.hat_a)?)?,
                    b_list: vecs(&b.b_list)?,
                    c_list: vecs(&b.c_list)?,
                    subspace: b.subspace.to_subspace()?,
                    b_sources: b.b_sources.clone(),
                    c_sources: b.c_sources.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisBlockDecomposition {
            partition: self.partition.clone(),
            blocks,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OddSpec {
    Zero,
    Linear { c: [f64; 3] },
    CubicZ { c: f64 },
}

impl OddSpec {
    fn to_odd(&self) -> OddPart<f64> {
        match *self {
            OddSpec::Zero => OddPart::Zero,
            OddSpec::Linear { c } => OddPart::Linear(c),
            OddSpec::CubicZ { c } => OddPart::CubicZ(c),
        }
    }
}

/// Serializable description of a frame-function oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    /// `⟨p|T|p⟩`.
    Born {
        dims: Vec<usize>,
        #[serde(rename = "T")]
        t: OperatorJson,
    },
    /// Qubit frame function `w/2 + ε(bloch)` times an oracle on the rest.
    QubitProduct {
        weight: f64,
        odd: OddSpec,
        rest: Box<OracleSpec>,
    },
    Counterexample {
        dims: Vec<usize>,
        weight: f64,
        psi: String,
        seed: u64,
    },
    Mixture { parts: Vec<(f64, OracleSpec)> },
}

impl OracleSpec {
    pub fn born_identity(dims: &Dims) -> Self {
        OracleSpec::Born {
            dims: dims.factors().to_vec(),
            t: operator_json(&CMatrix::identity(dims.total(), dims.total())),
        }
    }

    /// `g ⊗ Born(I)` with `g = w/2 + 0.3 p_z³` on `C^2 ⊗ tail`.
    pub fn cubic_qubit_product(weight: f64, tail: &Dims) -> Self {
        OracleSpec::QubitProduct {
            weight,
            odd: OddSpec::CubicZ { c: 0.3 },
            rest: Box::new(Self::born_identity(tail)),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn FrameOracle<f64>>> {
        Ok(match self {
            OracleSpec::Born { dims, t } => {
                Arc::new(born_oracle(operator_from_json(t)?, &Dims::new(dims.clone())?)?)
            }
            OracleSpec::QubitProduct { weight, odd, rest } => Arc::new(product_frame_oracle(
                QubitFrameFn::new(*weight, odd.to_odd()),
                rest.build()?,
            )),
            OracleSpec::Counterexample {
                dims,
                weight,
                psi,
                seed,
            } => Arc::new(counterexample_oracle(
                &Dims::new(dims.clone())?,
                *weight,
                PsiMap::parse(psi)?,
                *seed,
            )?),
            OracleSpec::Mixture { parts } => Arc::new(MixtureOracle::new(
                parts
                    .iter()
                    .map(|(l, o)| Ok((*l, o.build()?)))
                    .collect::<Result<Vec<_>>>()?,
            )?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramJson {
    pub min: f64,
    pub max: f64,
    pub counts: Vec<usize>,
}

/// Equal-width histogram over `[min, max]` of `values`.
pub fn histogram(values: &[f64], bins: usize) -> HistogramJson {
    let bins = bins.max(1);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return HistogramJson {
            min: 0.0,
            max: 0.0,
            counts: vec![0; bins],
        };
    }
    let mut counts = vec![0; bins];
    let width = max - min;
    for v in values {
        let k = if width > 0.0 {
            (((v - min) / width) * bins as f64) as usize
        } else {
            0
        };
        counts[k.min(bins - 1)] += 1;
    }
    HistogramJson { min, max, counts }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReportJson {
    pub weight: f64,
    pub samples: usize,
    pub invalid_bases: usize,
    pub mean: f64,
    pub max_deviation: f64,
    pub pass: bool,
    pub histogram: HistogramJson,
}

impl FrameReportJson {
    pub fn from_report(r: &FrameReport<f64>) -> Self {
        Self {
            weight: r.weight,
            samples: r.samples,
            invalid_bases: r.invalid_bases,
            mean: r.mean,
            max_deviation: r.max_deviation,
            pass: r.pass,
            histogram: histogram(&r.sums, 10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionJson {
    pub c: OperatorJson,
    pub asymmetry: f64,
    pub probe_condition: f64,
    pub evaluations: usize,
}

impl ReconstructionJson {
    pub fn from_reconstruction(r: &Reconstruction<f64>) -> Self {
        Self {
            c: operator_json(r.coefficients.matrix()),
            asymmetry: r.asymmetry,
            probe_condition: r.probe_condition,
            evaluations: r.evaluations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub residual: f64,
    #[serde(rename = "M")]
    pub samples: usize,
    pub seed: u64,
    pub underdetermined: bool,
}

impl FitJson {
    pub fn from_fit(r: &FitReport<f64>) -> Self {
        Self {
            residual: r.residual,
            samples: r.samples,
            seed: r.seed,
            underdetermined: r.underdetermined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionJson {
    Vandermonde { points: Vec<f64> },
    Random { seed: u64, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateJson {
    ExactByConstruction,
    Numeric { max_overlap: f64, restarts: usize },
    Refuted { witness: ProductStateJson },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertJson {
    pub dims: Vec<usize>,
    pub construction: ConstructionJson,
    pub certificate: CertificateJson,
    pub subspace: SubspaceJson,
}

impl CertJson {
    pub fn from_cert(c: &EntangledSubspaceCert<f64>) -> Self {
        Self {
            dims: c.dims.factors().to_vec(),
            construction: match &c.construction {
                Construction::Vandermonde { points } => ConstructionJson::Vandermonde {
                    points: points.clone(),
                },
                Construction::Random { seed, dim } => ConstructionJson::Random {
                    seed: *seed,
                    dim: *dim,
                },
            },
            certificate: match &c.certificate {
                Certificate::ExactByConstruction => CertificateJson::ExactByConstruction,
                Certificate::Numeric {
                    max_overlap,
                    restarts,
                } => CertificateJson::Numeric {
                    max_overlap: *max_overlap,
                    restarts: *restarts,
                },
                Certificate::Refuted { witness } => CertificateJson::Refuted {
                    witness: ProductStateJson::from_state(witness),
                },
            },
            subspace: SubspaceJson::from_subspace(&c.subspace),
        }
    }

    pub fn to_cert(&self) -> Result<EntangledSubspaceCert<f64>> {
        let dims = Dims::new(self.dims.clone())?;
        let subspace = self.subspace.to_subspace()?;
        if subspace.ambient() != dims.total() {
            return Err(Error::LengthMismatch(dims.total(), subspace.ambient()));
        }
        Ok(EntangledSubspaceCert {
            dims,
            subspace,
            construction: match &self.construction {
                ConstructionJson::Vandermonde { points } => Construction::Vandermonde {
                    points: points.clone(),
                },
                ConstructionJson::Random { seed, dim } => Construction::Random {
                    seed: *seed,
                    dim: *dim,
                },
            },
            certificate: match &self.certificate {
                CertificateJson::ExactByConstruction => Certificate::ExactByConstruction,
                CertificateJson::Numeric {
                    max_overlap,
                    restarts,
                } => Certificate::Numeric {
                    max_overlap: *max_overlap,
                    restarts: *restarts,
                },
                CertificateJson::Refuted { witness } => Certificate::Refuted {
                    witness: witness.to_state()?,
                },
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReportJson {
    pub residual: f64,
    pub witness: Option<ProductStateJson>,
}

impl ExactReportJson {
    pub fn from_report(r: &ExactReport<f64>) -> Self {
        Self {
            residual: r.residual,
            witness: r.witness.as_ref().map(ProductStateJson::from_state),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartJson {
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReportJson {
    pub best_overlap: f64,
    pub witness: ProductStateJson,
    pub best_restart: usize,
    pub restarts: usize,
    pub seed: u64,
    pub iterations: usize,
    pub all_converged: bool,
    pub logs: Vec<RestartJson>,
}

impl SearchReportJson {
    pub fn from_report(r: &SearchReport<f64>) -> Self {
        Self {
            best_overlap: r.best_overlap,
            witness: ProductStateJson::from_state(&r.witness),
            best_restart: r.best_restart,
            restarts: r.restarts,
            seed: r.seed,
            iterations: r.iterations(),
            all_converged: r.all_converged(),
            logs: r
                .logs
                .iter()
                .map(|l| RestartJson {
                    iterations: l.iterations,
                    converged: l.converged,
                    trace: l.trace.clone(),
                })
                .collect(),
        }
    }
}
