use proptest::prelude::*;

use gleason_core::bases::{
    decompose_qubit_basis_default, partitions, qubit_block_basis, BasisFamily,
};
use gleason_core::frames::{basis_sum, born_oracle, FrameOracle};
use gleason_core::random::{self, rng};
use gleason_core::reconstruct::reconstruct;
use gleason_core::subspaces::{
    max_entangled_dim, product_overlap_search, random_subspace, vandermonde_subspace,
    SearchOptions,
};
use gleason_core::tensor::{kron, overlap, ProductState};
use gleason_core::Dims;

fn small_dims() -> impl Strategy<Value = Dims> {
    prop::collection::vec(2usize..=3, 1..=3).prop_map(|f| Dims::new(f).unwrap())
}

fn multi_dims() -> impl Strategy<Value = Dims> {
    prop::collection::vec(2usize..=3, 2..=3).prop_map(|f| Dims::new(f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flat_and_multi_index_agree(d in small_dims(), k in 0usize..27) {
        let k = k % d.total();
        prop_assert_eq!(d.flat_index(&d.multi_index(k)), k);
    }

    #[test]
    fn product_overlap_factorizes(d in small_dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random::random_product_state::<f64, _>(&d, &mut r);
        let q = random::random_product_state::<f64, _>(&d, &mut r);
        let whole = overlap(&p.expand(), &q.expand()).unwrap();
        let parts = p
            .factors()
            .iter()
            .zip(q.factors())
            .fold(num_complex::Complex::new(1.0, 0.0), |acc, (a, b)| {
                acc * a.amplitudes().dotc(b.amplitudes())
            });
        prop_assert!((whole - parts).norm() < 1e-12);
        prop_assert!((p.expand().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_convention_is_idempotent(d in small_dims(), seed in any::<u64>()) {
        let p = random::random_product_state::<f64, _>(&d, &mut rng(seed));
        let again = ProductState::new(p.factors().to_vec());
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(p.canonical().canonical(), p.canonical());
    }

    #[test]
    fn kron_expansion_matches_product_state(d in small_dims(), seed in any::<u64>()) {
        let p = random::random_product_state::<f64, _>(&d, &mut rng(seed));
        let vs: Vec<_> = p.factors().iter().map(|f| f.amplitudes().clone()).collect();
        prop_assert!((kron(&vs) - p.expand()).norm() < 1e-15);
    }

    #[test]
    fn sampled_bases_are_orthonormal(d in multi_dims(), seed in any::<u64>(), index in 0u64..1000) {
        for family in BasisFamily::ALL.into_iter().filter(|f| f.supports(&d)) {
            let b = family.sample::<f64>(&d, seed, index).unwrap();
            prop_assert_eq!(b.len(), d.total());
            prop_assert!(b.validate(1e-10).pass, "{} on {}", family.name(), d);
        }
    }

    #[test]
    fn born_sums_equal_trace(d in multi_dims(), seed in any::<u64>(), index in 0u64..1000) {
        let t = random::random_hermitian::<f64, _>(d.total(), &mut rng(seed));
        let oracle = born_oracle(t.clone(), &d).unwrap();
        for family in BasisFamily::ALL.into_iter().filter(|f| f.supports(&d)) {
            let b = family.sample::<f64>(&d, seed, index).unwrap();
            prop_assert!((basis_sum(&oracle, &b) - oracle.declared_weight()).abs() < 1e-9);
        }
        prop_assert!((oracle.declared_weight() - t.trace()).abs() < 1e-12);
    }

    #[test]
    fn block_partition_is_recovered(n in 1usize..=6, pick in any::<usize>(), seed in any::<u64>()) {
        let all = partitions(n);
        let partition = &all[pick % all.len()];
        let b = qubit_block_basis::<f64>(n, partition, seed).unwrap();
        let dec = decompose_qubit_basis_default(&b).unwrap();
        prop_assert_eq!(&dec.partition, partition);
        prop_assert!(dec.reconstruction_error(&b) < 1e-9);
        let sizes: Vec<usize> = dec.blocks.iter().map(|k| k.subspace.dim()).collect();
        prop_assert_eq!(&sizes, partition);
    }

    #[test]
    fn reconstruction_inverts_born(d in multi_dims(), seed in any::<u64>()) {
        let t = random::random_hermitian::<f64, _>(d.total(), &mut rng(seed));
        let rec = reconstruct(&born_oracle(t.clone(), &d).unwrap(), &d).unwrap();
        prop_assert!(rec.coefficients.max_entry_distance(&t) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn search_traces_never_decrease(seed in any::<u64>(), extra in 0usize..=2) {
        let d = Dims::new(vec![3, 3]).unwrap();
        let s = random_subspace::<f64>(&d, 3 + extra, seed).unwrap();
        let opts = SearchOptions { restarts: 6, seed, ..SearchOptions::default() };
        let rep = product_overlap_search(&d, &s, &opts).unwrap();
        prop_assert!(rep.max_trace_drop() <= 1e-13);
        prop_assert!(rep.best_overlap <= 1.0);
    }
}

#[test]
fn vandermonde_attains_bound_on_grid() {
    for n in 1..=4u32 {
        for code in 0..4usize.pow(n) {
            let f: Vec<usize> = (0..n).map(|k| 2 + code / 4usize.pow(k) % 4).collect();
            let d = Dims::new(f).unwrap();
            if d.total() > 400 {
                continue;
            }
            let cert = vandermonde_subspace::<f64>(&d, None).unwrap();
            assert_eq!(cert.subspace.dim(), max_entangled_dim(&d), "{d}");
        }
    }
}
