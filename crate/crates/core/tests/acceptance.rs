//! End-to-end acceptance criteria. Runs as a plain binary so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::time::{Duration, Instant};

use gleason_core::bases::{
    decompose_qubit_basis_default, partitions, qubit_block_basis, BasisFamily,
};
use gleason_core::frames::{
    born_oracle, counterexample_oracle, product_frame_oracle, verify_frame, worst_reversed_basis,
    FamilySource, FrameOracle, PsiMap, QubitFrameFn,
};
use gleason_core::random::{self, rng};
use gleason_core::reconstruct::{hermitian_fit_residual, reconstruct};
use gleason_core::subspaces::{
    exact_rank1_test_small, max_entangled_dim, product_overlap_search, random_subspace,
    vandermonde_subspace, SearchOptions,
};
use gleason_core::tensor::{CVector, HermitianOp, Subspace};
use gleason_core::{Dims, Error};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn dims(f: &[usize]) -> Dims {
    Dims::new(f.to_vec()).unwrap()
}

fn reconstruction_round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst = [0.0f64; 2];
    let mut r = rng(101);
    for (slot, (f, count)) in [(&[3, 3][..], 50), (&[3, 3, 3], 10)].into_iter().enumerate() {
        let d = dims(f);
        for _ in 0..count {
            let t = random::random_hermitian::<f64, _>(d.total(), &mut r);
            let oracle = born_oracle(t.clone(), &d).unwrap();
            let rec = reconstruct(&oracle, &d).unwrap();
            worst[slot] = worst[slot].max(rec.coefficients.max_entry_distance(&t));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst[0] < 1e-9 && worst[1] < 1e-8 && elapsed < Duration::from_secs(10),
        detail: format!(
            "max entry error (3,3) {:.2e}, (3,3,3) {:.2e}, {:.2?}",
            worst[0], worst[1], elapsed
        ),
    }
}

fn frame_sum_constancy() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for f in [&[2, 3][..], &[3, 3], &[2, 2, 2]] {
        let d = dims(f);
        let t = random::random_hermitian::<f64, _>(d.total(), &mut rng(d.total() as u64));
        let oracle = born_oracle(t, &d).unwrap();
        for family in BasisFamily::ALL.into_iter().filter(|fam| fam.supports(&d)) {
            let report = verify_frame(&oracle, &FamilySource::new(&d, family, 7), 1000, 1e-9).unwrap();
            pass &= report.pass && report.sums.len() == 1000;
            parts.push(format!("{d} {} {:.1e}", family.name(), report.max_deviation));
        }
    }
    Outcome {
        pass,
        detail: format!("max deviation: {}", parts.join(", ")),
    }
}

fn qubit_product_demonstration() -> Outcome {
    let d = dims(&[2, 3]);
    let rest = born_oracle(HermitianOp::<f64>::identity(3), &dims(&[3])).unwrap();
    let oracle = product_frame_oracle(QubitFrameFn::cubic(1.0), std::sync::Arc::new(rest));
    let report = verify_frame(
        &oracle,
        &FamilySource::new(&d, BasisFamily::QubitBlock, 3),
        1000,
        1e-9,
    )
    .unwrap();
    let fit = hermitian_fit_residual(&oracle, &d, 2000, 5).unwrap();
    let min_value = (0..2000u64)
        .map(|i| oracle.eval(&random::random_product_state(&d, &mut random::rng_stream(9, i))))
        .fold(f64::INFINITY, f64::min);
    Outcome {
        pass: report.pass
            && (report.weight - 3.0).abs() < 1e-15
            && fit.residual > 1e-3
            && min_value >= 0.0,
        detail: format!(
            "sum deviation {:.1e} over {} bases, fit residual {:.3e}, min value {:.3}",
            report.max_deviation,
            report.sums.len(),
            fit.residual,
            min_value
        ),
    }
}

fn product_basis_counterexample() -> Outcome {
    let d = dims(&[3, 3]);
    let oracle = counterexample_oracle::<f64>(&d, 9.0, PsiMap::ModulusWeightedConjugate, 0).unwrap();
    let report = verify_frame(&oracle, &FamilySource::new(&d, BasisFamily::Product, 11), 1000, 1e-9).unwrap();
    let fit = hermitian_fit_residual(&oracle, &d, 2000, 13).unwrap();
    let (index, sum) = worst_reversed_basis(&oracle, 17, 200).unwrap();
    Outcome {
        pass: report.pass && fit.residual > 1e-3 && (sum - 9.0).abs() > 0.01,
        detail: format!(
            "product-basis deviation {:.1e}, fit residual {:.3e}, reversed basis #{index} sums to {sum:.4}",
            report.max_deviation, fit.residual
        ),
    }
}

fn block_decomposition_round_trip() -> Outcome {
    let start = Instant::now();
    let all: Vec<Vec<Vec<usize>>> = (1..=6).map(partitions).collect();
    let mut wrong_partition = 0;
    let mut violations = 0;
    let mut other_errors = 0;
    let mut worst = 0.0f64;
    for i in 0..500usize {
        let n = 1 + i % 6;
        let parts = &all[n - 1];
        let partition = &parts[(i / 6) % parts.len()];
        let basis = qubit_block_basis::<f64>(n, partition, 1000 + i as u64).unwrap();
        match decompose_qubit_basis_default(&basis) {
            Ok(dec) => {
                if &dec.partition != partition {
                    wrong_partition += 1;
                }
                worst = worst.max(dec.reconstruction_error(&basis));
            }
            Err(Error::StructureViolation { .. }) => violations += 1,
            Err(_) => other_errors += 1,
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: wrong_partition == 0
            && violations == 0
            && other_errors == 0
            && worst <= 1e-9
            && elapsed < Duration::from_secs(5),
        detail: format!(
            "500 bases: {wrong_partition} wrong partitions, {violations} violations, {other_errors} other errors, max |1 - |overlap|| {worst:.1e}, {elapsed:.2?}"
        ),
    }
}

fn bound_and_attainment() -> Outcome {
    let table = [
        (&[2, 2][..], 1),
        (&[2, 3], 2),
        (&[3, 3], 4),
        (&[2, 2, 2], 4),
        (&[3, 3, 3], 20),
    ];
    let mut pass = true;
    for (f, want) in table {
        let d = dims(f);
        let cert = vandermonde_subspace::<f64>(&d, None).unwrap();
        pass &= max_entangled_dim(&d) == want && cert.subspace.dim() == want;
    }
    let d33 = dims(&[3, 3]);
    let cert = vandermonde_subspace::<f64>(&d33, None).unwrap();
    let opts = SearchOptions {
        restarts: 200,
        seed: 21,
        ..SearchOptions::default()
    };
    let search = product_overlap_search(&d33, &cert.subspace, &opts).unwrap();
    let d23 = dims(&[2, 3]);
    let small = vandermonde_subspace::<f64>(&d23, None).unwrap();
    let exact = exact_rank1_test_small(&d23, &small.subspace).unwrap();
    pass &= search.best_overlap < 0.999 && exact.witness.is_none();
    Outcome {
        pass,
        detail: format!(
            "bounds and kernel dims match, (3,3) best overlap {:.6} over 200 restarts, (2,3) exact minor residual {:.3e}",
            search.best_overlap, exact.residual
        ),
    }
}

fn bound_sharpness() -> Outcome {
    let d33 = dims(&[3, 3]);
    let found = (0..100u64)
        .filter(|&seed| {
            let s = random_subspace::<f64>(&d33, 5, 500 + seed).unwrap();
            let opts = SearchOptions {
                restarts: 20,
                seed,
                ..SearchOptions::default()
            };
            product_overlap_search(&d33, &s, &opts).unwrap().best_overlap > 1.0 - 1e-6
        })
        .count();
    let d22 = dims(&[2, 2]);
    let exact_found = (0..100u64)
        .filter(|&seed| {
            let s = random_subspace::<f64>(&d22, 2, 700 + seed).unwrap();
            exact_rank1_test_small(&d22, &s).unwrap().witness.is_some()
        })
        .count();
    Outcome {
        pass: found >= 99 && exact_found == 100,
        detail: format!("(3,3) dim 5: {found}/100 found; (2,2) dim 2: {exact_found}/100 exact witnesses"),
    }
}

/// Subspace number `i` of a mixed pool: `(2,2)` or `(2,3)`, dimension 1 or
/// 2, and every other one seeded with a product vector.
fn small_subspace(i: u64) -> (Dims, Subspace<f64>) {
    let d = if i.is_multiple_of(2) { dims(&[2, 2]) } else { dims(&[2, 3]) };
    let k = 1 + (i as usize / 2) % 2;
    let planted = (i / 4) % 2 == 1;
    let mut r = rng(900 + i);
    let mut vs: Vec<CVector<f64>> = Vec::new();
    if planted {
        vs.push(random::random_product_state::<f64, _>(&d, &mut r).expand());
    }
    while vs.len() < k {
        vs.push(random::random_unit_vector(d.total(), &mut r));
    }
    let s = Subspace::span(d.total(), &vs).unwrap();
    (d, s)
}

fn oracle_agreement() -> Outcome {
    let mut agree = 0;
    let mut disagree = 0;
    let mut inconclusive = 0;
    let mut with_product = 0;
    for i in 0..200u64 {
        let (d, s) = small_subspace(i);
        let exact = exact_rank1_test_small(&d, &s).unwrap();
        let opts = SearchOptions {
            restarts: 30,
            seed: i,
            ..SearchOptions::default()
        };
        let overlap = product_overlap_search(&d, &s, &opts).unwrap().best_overlap;
        let numeric = if overlap > 1.0 - 1e-6 {
            Some(true)
        } else if overlap < 1.0 - 1e-3 {
            Some(false)
        } else {
            None
        };
        with_product += exact.witness.is_some() as usize;
        match numeric {
            None => inconclusive += 1,
            Some(v) if v == exact.witness.is_some() => agree += 1,
            Some(_) => disagree += 1,
        }
    }
    Outcome {
        pass: disagree == 0 && agree > 0,
        detail: format!(
            "{agree} agree, {disagree} disagree, {inconclusive} inconclusive (excluded); {with_product} contain product vectors"
        ),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("reconstruction round trip", reconstruction_round_trip),
        ("frame-sum constancy", frame_sum_constancy),
        ("qubit product frame function is not Born", qubit_product_demonstration),
        ("product-basis counterexample", product_basis_counterexample),
        ("block decomposition round trip", block_decomposition_round_trip),
        ("entangled-subspace bound and attainment", bound_and_attainment),
        ("bound sharpness", bound_sharpness),
        ("exact and numeric product tests agree", oracle_agreement),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name}: {}", k + 1, outcome.detail);
        failed += (!outcome.pass) as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
