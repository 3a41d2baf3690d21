use std::path::Path;
use std::sync::Arc;

use gleason_core::bases::{
    decompose_qubit_basis, is_product_basis, mixed_unentangled_basis, qubit_block_basis,
    qubit_block_product_tail, random_partition, random_product_basis, reversed_structure_basis,
    BasisFamily, UnentangledBasis,
};
use gleason_core::frames::{
    basis_sum, verify_frame, worst_reversed_basis, FamilySource, FrameOracle, FrameReport,
};
use gleason_core::json::{
    BasisJson, CertJson, ConstructionJson, DecompositionJson, ExactReportJson, FitJson,
    FrameReportJson, OracleSpec, ProductStateJson, ReconstructionJson, SearchReportJson,
    SubspaceJson,
};
use gleason_core::random::{self, rng};
use gleason_core::reconstruct::{
    born_consistency, hermitian_fit_residual, reconstruct_on_grid, PolarizationGrid,
};
use gleason_core::subspaces::{
    entangled_verdict_detail, max_entangled_dim, product_overlap_search,
    random_entangled_candidate, vandermonde_functionals, vandermonde_subspace, SearchOptions,
    Verdict, VerdictPolicy,
};
use gleason_core::tensor::{Subspace, CMatrix};
use gleason_core::Dims;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{field, read_input, CliError, Outcome, Status};
use crate::{BasisKind, OracleArgs, OracleKind, SearchArgs, SubspaceMethod};

fn validate_basis(b: &UnentangledBasis<f64>, tol: f64) -> Result<f64, CliError> {
    let report = b.validate(tol);
    if report.pass {
        Ok(report.max_deviation)
    } else {
        Err(CliError::Invalid(format!(
            "basis is not orthonormal: max deviation {:e}",
            report.max_deviation
        )))
    }
}

pub fn gen_basis(dims: &Dims, kind: BasisKind, partition: Option<&[usize]>, seed: u64) -> Result<Outcome, CliError> {
    let basis = match kind {
        BasisKind::Product => random_product_basis(dims, seed),
        BasisKind::Mixed => mixed_unentangled_basis(dims, seed),
        BasisKind::Reversed => {
            if dims.len() < 2 {
                return Err(CliError::Usage("reversed bases need at least two factors".into()));
            }
            reversed_structure_basis(dims, dims.len() - 1, seed)?
        }
        BasisKind::QubitBlock => {
            let tail = match dims.tail() {
                Some(t) if dims.factors()[0] == 2 => t,
                _ => return Err(CliError::Usage(format!("qubit-block bases need dims 2,..., got {dims}"))),
            };
            if tail.len() == 1 {
                let n = tail.total();
                let partition = match partition {
                    Some(p) => p.to_vec(),
                    None => random_partition(n, &mut rng(seed)),
                };
                qubit_block_basis(n, &partition, seed)?
            } else if partition.is_some() {
                return Err(CliError::Usage("--partition applies to dims 2,n only".into()));
            } else {
                qubit_block_product_tail(&tail, seed)
            }
        }
    };
    let deviation = validate_basis(&basis, 1e-10)?;
    let product = is_product_basis(&basis);
    let text = format!(
        "{} basis of {dims}: {} members, orthonormality deviation {deviation:e}, product basis: {product}\n",
        kind.name(),
        basis.len()
    );
    Ok(Outcome::new(Status::Ok, BasisJson::from_basis(&basis), text)?.with_check(|v| {
        let b: BasisJson = serde_json::from_value(v.clone())?;
        validate_basis(&b.to_basis()?, 1e-10).map(|_| ())
    }))
}

pub fn check_basis(input: &Path, tol: f64) -> Result<Outcome, CliError> {
    let b: BasisJson = read_input(input)?;
    let basis = b.to_basis()?;
    let report = basis.validate(tol);
    let product = is_product_basis(&basis);
    let result = json!({
        "dims": basis.dims().factors(),
        "members": basis.len(),
        "max_deviation": report.max_deviation,
        "orthonormal": report.pass,
        "product_basis": product,
    });
    let text = format!(
        "{} members on {}: orthonormal {} (max deviation {:e}), product basis: {product}\n",
        basis.len(),
        basis.dims(),
        report.pass,
        report.max_deviation
    );
    Outcome::new(Status::from_pass(report.pass), result, text)
}

pub fn decompose(input: &Path, tol: f64) -> Result<Outcome, CliError> {
    let b: BasisJson = read_input(input)?;
    let basis = b.to_basis()?;
    validate_basis(&basis, tol)?;
    let dec = decompose_qubit_basis(&basis, tol)?;
    let out = DecompositionJson::from_decomposition(&dec, &basis);
    let text = format!(
        "partition {:?}, {} blocks, member reconstruction error {:e}\n",
        dec.partition,
        dec.blocks.len(),
        out.reconstruction_error
    );
    Ok(Outcome::new(Status::Ok, &out, text)?.with_check(|v| {
        let d: DecompositionJson = serde_json::from_value(v.clone())?;
        let dec = d.to_decomposition()?;
        if dec.blocks.iter().map(|b| b.size()).collect::<Vec<_>>() != d.partition {
            return Err(CliError::Invalid("block sizes disagree with the partition".into()));
        }
        Ok(())
    }))
}

/// Resolves the oracle flags to a description and its dims.
pub fn oracle_spec(args: &OracleArgs, seed: u64) -> Result<OracleSpec, CliError> {
    if let Some(path) = &args.input {
        return read_input(path);
    }
    let dims = args
        .dims
        .clone()
        .ok_or_else(|| CliError::Usage("--dims is required unless --in names an oracle file".into()))?;
    Ok(match args.oracle {
        OracleKind::BornIdentity => OracleSpec::born_identity(&dims),
        OracleKind::BornRandom => {
            let t = random::random_hermitian::<f64, _>(dims.total(), &mut rng(seed));
            OracleSpec::Born {
                dims: dims.factors().to_vec(),
                t: gleason_core::json::operator_json(t.matrix()),
            }
        }
        OracleKind::QubitProduct => {
            let tail = match dims.tail() {
                Some(t) if dims.factors()[0] == 2 => t,
                _ => return Err(CliError::Usage(format!("qubit-product needs dims 2,..., got {dims}"))),
            };
            OracleSpec::cubic_qubit_product(args.weight.unwrap_or(1.0), &tail)
        }
        OracleKind::Counterexample => OracleSpec::Counterexample {
            dims: dims.factors().to_vec(),
            weight: args.weight.unwrap_or(dims.total() as f64),
            psi: args.psi.clone(),
            seed,
        },
    })
}

fn frame_text(label: &str, r: &FrameReport<f64>) -> String {
    format!(
        "{label}: weight {}, mean sum {}, max deviation {:e}, {} valid of {} bases, {}\n",
        r.weight,
        r.mean,
        r.max_deviation,
        r.sums.len(),
        r.samples,
        if r.pass { "PASS" } else { "FAIL" }
    )
}

pub fn frame_verify(
    args: &OracleArgs,
    family: BasisKind,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let spec = oracle_spec(args, seed)?;
    let oracle = spec.build()?;
    let family = family.family();
    let dims = oracle.dims().clone();
    if !family.supports(&dims) {
        return Err(CliError::Usage(format!("{} bases do not exist on {dims}", family.name())));
    }
    let report = verify_frame(&*oracle, &FamilySource::new(&dims, family, seed), samples, tol)?;
    let text = frame_text(&format!("{} bases on {dims}", family.name()), &report);
    let result = json!({
        "oracle": spec,
        "family": family.name(),
        "dims": dims.factors(),
        "tol": tol,
        "report": FrameReportJson::from_report(&report),
    });
    Outcome::new(Status::from_pass(report.pass), result, text)
}

pub fn reconstruct_cmd(args: &OracleArgs, tol: f64, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    let spec = oracle_spec(args, seed)?;
    let oracle = spec.build()?;
    let dims = oracle.dims().clone();
    let rec = reconstruct_on_grid(&*oracle, &PolarizationGrid::standard(&dims)?, tol)?;
    let consistency = born_consistency(&*oracle, &rec.coefficients, samples, seed);
    let pass = consistency <= tol;
    let text = format!(
        "reconstructed {0}x{0} coefficients on {dims} from {1} evaluations: asymmetry {2:e}, probe condition {3}, trace {4}, consistency error {5:e} over {samples} product states, {6}\n",
        dims.total(),
        rec.evaluations,
        rec.asymmetry,
        rec.probe_condition,
        rec.coefficients.trace(),
        consistency,
        if pass { "Born form" } else { "not a Born form" }
    );
    let result = json!({
        "oracle": spec,
        "reconstruction": ReconstructionJson::from_reconstruction(&rec),
        "consistency": { "samples": samples, "max_error": consistency, "born": pass },
    });
    Outcome::new(Status::from_pass(pass), result, text)
}

pub fn residual(args: &OracleArgs, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    let spec = oracle_spec(args, seed)?;
    let oracle = spec.build()?;
    let dims = oracle.dims().clone();
    let fit = hermitian_fit_residual(&*oracle, &dims, samples, seed)?;
    let text = format!(
        "Hermitian fit residual on {dims}: {:e} (RMS over M = {samples} product states{})\n",
        fit.residual,
        if fit.underdetermined { ", underdetermined" } else { "" }
    );
    let result = json!({ "oracle": spec, "fit": FitJson::from_fit(&fit) });
    Outcome::new(Status::Ok, result, text)
}

#[derive(Serialize)]
struct WitnessJson {
    index: u64,
    sum: f64,
    deviation: f64,
    basis: BasisJson,
}

#[allow(clippy::too_many_arguments)]
pub fn counterexample(
    dims: &Dims,
    weight: Option<f64>,
    psi: &str,
    samples: usize,
    tries: usize,
    fit_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let spec = OracleSpec::Counterexample {
        dims: dims.factors().to_vec(),
        weight: weight.unwrap_or(dims.total() as f64),
        psi: psi.to_string(),
        seed,
    };
    let oracle = spec.build()?;
    let w = oracle.declared_weight();
    let product = verify_frame(&*oracle, &FamilySource::new(dims, BasisFamily::Product, seed), samples, tol)?;
    let (index, sum) = worst_reversed_basis(&*oracle, seed, tries)?;
    let witness = BasisFamily::Reversed.sample::<f64>(dims, seed, index)?;
    let fit = hermitian_fit_residual(&*oracle, dims, fit_samples, seed)?;
    let separated = product.pass && (sum - w).abs() > 0.01 && fit.residual > 1e-3;
    let text = format!(
        "{}{}reversed-structure basis #{index} of {tries}: sum {sum} (deviation {:e})\nHermitian fit residual {:e} over M = {fit_samples}\nproduct-basis frame function that is not an unentangled frame function: {separated}\n",
        format_args!("counterexample oracle on {dims}, weight {w}, psi {psi}\n"),
        frame_text("product bases", &product),
        (sum - w).abs(),
        fit.residual,
    );
    let result = json!({
        "oracle": spec,
        "product_bases": FrameReportJson::from_report(&product),
        "witness": WitnessJson {
            index,
            sum,
            deviation: (sum - w).abs(),
            basis: BasisJson::from_basis(&witness),
        },
        "fit": FitJson::from_fit(&fit),
        "separated": separated,
    });
    Ok(Outcome::new(Status::from_pass(separated), result, text)?.with_check(|v| {
        let spec: OracleSpec = field(v, "oracle")?;
        let witness = v
            .get("witness")
            .ok_or_else(|| CliError::Invalid("artifact lacks \"witness\"".into()))?;
        let basis: BasisJson = field(witness, "basis")?;
        let sum: f64 = field(witness, "sum")?;
        let basis = basis.to_basis()?;
        validate_basis(&basis, 1e-10)?;
        let again = basis_sum(&*spec.build()?, &basis);
        if (again - sum).abs() > 1e-12 {
            return Err(CliError::Invalid(format!("witness sum {again} differs from recorded {sum}")));
        }
        Ok(())
    }))
}

pub fn entangled_dim(dims: &Dims) -> Result<Outcome, CliError> {
    let k = max_entangled_dim(dims);
    Outcome::new(
        Status::Ok,
        json!({ "dims": dims.factors(), "max_entangled_dim": k }),
        format!("{k}\n"),
    )
}

impl SearchArgs {
    pub fn options(&self, seed: u64) -> SearchOptions {
        SearchOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.search_tol,
            seed,
        }
    }

    pub fn policy(&self, seed: u64) -> VerdictPolicy {
        VerdictPolicy {
            found: self.found,
            not_found: self.not_found,
            min_restarts: self.min_restarts,
            search: self.options(seed),
            exact_small: !self.no_exact,
        }
    }
}

fn verdict_json(v: &Verdict<f64>) -> Value {
    match v {
        Verdict::CertifiedEntangled => json!({ "verdict": v.name() }),
        Verdict::NumericallyEntangled { best_overlap, restarts }
        | Verdict::Inconclusive { best_overlap, restarts } => json!({
            "verdict": v.name(),
            "best_overlap": best_overlap,
            "restarts": restarts,
        }),
        Verdict::ContainsProduct { witness, best_overlap } => json!({
            "verdict": v.name(),
            "best_overlap": best_overlap,
            "witness": ProductStateJson::from_state(witness),
        }),
    }
}

fn verdict_status(v: &Verdict<f64>, product_is_failure: bool) -> Status {
    match v {
        Verdict::Inconclusive { .. } => Status::Inconclusive,
        Verdict::ContainsProduct { .. } if product_is_failure => Status::Failed,
        _ => Status::Ok,
    }
}

fn verdict_text(v: &Verdict<f64>) -> String {
    match v {
        Verdict::CertifiedEntangled => "verdict: certified_entangled\n".to_string(),
        Verdict::NumericallyEntangled { best_overlap, restarts }
        | Verdict::Inconclusive { best_overlap, restarts } => format!(
            "verdict: {} (best product overlap {best_overlap} over {restarts} restarts)\n",
            v.name()
        ),
        Verdict::ContainsProduct { best_overlap, .. } => {
            format!("verdict: contains_product (overlap {best_overlap})\n")
        }
    }
}

fn check_cert(v: &Value) -> Result<(), CliError> {
    let c: CertJson = serde_json::from_value(v.clone())?;
    let cert = c.to_cert()?;
    if let ConstructionJson::Vandermonde { points } = &c.construction {
        if cert.subspace.dim() != max_entangled_dim(&cert.dims) {
            return Err(CliError::Invalid("kernel dimension differs from the bound".into()));
        }
        let rows = vandermonde_functionals::<f64>(&cert.dims, points)?;
        let m = CMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
        let residual = (&m * cert.subspace.basis()).norm() / m.norm();
        if residual > 1e-9 {
            return Err(CliError::Invalid(format!("functionals do not vanish: {residual:e}")));
        }
    }
    Ok(())
}

pub fn entangled_subspace(
    dims: &Dims,
    method: SubspaceMethod,
    points: Option<&[f64]>,
    dim: Option<usize>,
    search: &SearchArgs,
    seed: u64,
) -> Result<Outcome, CliError> {
    let policy = search.policy(seed);
    let (cert, report, verdict) = match method {
        SubspaceMethod::Vandermonde => {
            let cert = vandermonde_subspace::<f64>(dims, points)?;
            let report = (search.restarts > 0)
                .then(|| product_overlap_search(dims, &cert.subspace, &policy.search))
                .transpose()?;
            (cert, report, Verdict::CertifiedEntangled)
        }
        SubspaceMethod::Random => {
            if points.is_some() {
                return Err(CliError::Usage("--points applies to the vandermonde method".into()));
            }
            let k = dim.unwrap_or_else(|| max_entangled_dim(dims));
            let (cert, report) =
                random_entangled_candidate::<f64>(dims, k, seed, &policy.search, &policy)?;
            let verdict = policy.classify(&report);
            (cert, Some(report), verdict)
        }
    };
    let mut text = format!(
        "{} subspace of {dims}: dimension {} (bound {})\n",
        method.name(),
        cert.subspace.dim(),
        max_entangled_dim(dims)
    );
    if let Some(r) = &report {
        text += &format!("product search: best overlap {} over {} restarts\n", r.best_overlap, r.restarts);
    }
    text += &verdict_text(&verdict);
    let mut result = serde_json::to_value(CertJson::from_cert(&cert))?;
    result["verdict"] = verdict_json(&verdict);
    if let Some(r) = &report {
        result["search"] = serde_json::to_value(SearchReportJson::from_report(r))?;
    }
    Ok(Outcome::new(verdict_status(&verdict, true), result, text)?.with_check(check_cert))
}

pub fn find_product(
    input: &Path,
    dims: Option<&Dims>,
    search: &SearchArgs,
    seed: u64,
) -> Result<Outcome, CliError> {
    let value: Value = read_input(input)?;
    let (dims, subspace): (Dims, Subspace<f64>) = if value.get("construction").is_some() {
        let cert = serde_json::from_value::<CertJson>(value)?.to_cert()?;
        (cert.dims, cert.subspace)
    } else {
        let s: SubspaceJson = serde_json::from_value(value)?;
        let dims = dims
            .cloned()
            .ok_or_else(|| CliError::Usage("--dims is required for a bare subspace file".into()))?;
        (dims, s.to_subspace()?)
    };
    if subspace.ambient() != dims.total() {
        return Err(CliError::Invalid(format!(
            "subspace lives in C^{}, dims {dims} give {}",
            subspace.ambient(),
            dims.total()
        )));
    }
    let detail = entangled_verdict_detail(&dims, &subspace, &search.policy(seed))?;
    let mut text = format!("subspace of dimension {} in {dims}\n", subspace.dim());
    let mut result = json!({ "dims": dims.factors(), "subspace_dim": subspace.dim() });
    if let Some(e) = &detail.exact {
        text += &format!("exact 2x2-minor test: residual {:e}\n", e.residual);
        result["exact"] = serde_json::to_value(ExactReportJson::from_report(e))?;
    }
    if let Some(r) = &detail.search {
        text += &format!("product search: best overlap {} over {} restarts\n", r.best_overlap, r.restarts);
        result["search"] = serde_json::to_value(SearchReportJson::from_report(r))?;
    }
    text += &verdict_text(&detail.verdict);
    result["verdict"] = verdict_json(&detail.verdict);
    Outcome::new(verdict_status(&detail.verdict, false), result, text)
}

pub fn demo_qubit_product(samples: usize, fit_samples: usize, tol: f64, seed: u64) -> Result<Outcome, CliError> {
    let dims = Dims::new(vec![2, 3])?;
    let spec = OracleSpec::cubic_qubit_product(1.0, &Dims::new(vec![3])?);
    let oracle: Arc<dyn FrameOracle<f64>> = spec.build()?;
    let report = verify_frame(
        &*oracle,
        &FamilySource::new(&dims, BasisFamily::QubitBlock, seed),
        samples,
        tol,
    )?;
    let fit = hermitian_fit_residual(&*oracle, &dims, fit_samples, seed)?;
    let min_value = (0..fit_samples as u64)
        .map(|i| oracle.eval(&random::random_product_state(&dims, &mut random::rng_stream(seed, i))))
        .fold(f64::INFINITY, f64::min);
    let not_born = report.pass && fit.residual > 1e-3 && min_value >= 0.0;
    let text = format!(
        "oracle g(a) h(u) on {dims}: g = 1/2 + 0.3 p_z^3, h = Born(I_3)\n{}Hermitian fit residual {:e} over M = {fit_samples}\nminimum sampled value {min_value}\nnonnegative unentangled frame function that is not Born: {not_born}\n",
        frame_text("qubit-block bases", &report),
        fit.residual,
    );
    let result = json!({
        "oracle": spec,
        "qubit_block_bases": FrameReportJson::from_report(&report),
        "fit": FitJson::from_fit(&fit),
        "min_value": min_value,
        "not_born": not_born,
    });
    Outcome::new(Status::from_pass(not_born), result, text)
}
