mod common;

use common::{brute_partial_trace, kron, max_diff, trace};
use proptest::prelude::*;
use qgames::qcore::linalg::{
    c, hermitian_part, identity, min_eigenvalue, partial_trace, trace_product,
};
use qgames::qcore::random::{ginibre_with, rng_for};
use qgames::qcore::{
    contract_left, contract_right, random_channel, random_density, spectral_decompose, CMatrix,
    DensityOperator, KrausChannel, Povm,
};
use qgames::Error;

fn ginibre(seed: u64, r: usize, cols: usize) -> CMatrix {
    ginibre_with(&mut rng_for(seed, 0), r, cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_matches_index_sum(seed in 0u64..10_000, d0 in 1usize..4, d1 in 1usize..4, d2 in 1usize..3, mask in 1usize..8) {
        let dims = [d0, d1, d2];
        let n = d0 * d1 * d2;
        let m = ginibre(seed, n, n);
        let keep: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let ours = partial_trace(&m, &dims, &keep).unwrap();
        prop_assert!(max_diff(&ours, &brute_partial_trace(&m, &dims, &keep)) < 1e-12);
    }

    #[test]
    fn trace_out_second_factor(seed in 0u64..10_000, da in 1usize..5, db in 1usize..5) {
        let a = ginibre(seed, da, da);
        let b = ginibre(seed + 1, db, db);
        let ab = kron(&a, &b);
        let left = partial_trace(&ab, &[da, db], &[0]).unwrap();
        prop_assert!(max_diff(&left, &a.map(|v| v * trace(&b))) < 1e-12);
        let right = partial_trace(&ab, &[da, db], &[1]).unwrap();
        prop_assert!(max_diff(&right, &b.map(|v| v * trace(&a))) < 1e-12);
    }

    #[test]
    fn contractions_match_partial_traces(seed in 0u64..10_000, dl in 1usize..4, dr in 1usize..4) {
        let j = ginibre(seed, dl * dr, dl * dr);
        let opl = ginibre(seed + 1, dl, dl);
        let opr = ginibre(seed + 2, dr, dr);
        let viaj = partial_trace(&(kron(&opl, &identity(dr)) * &j), &[dl, dr], &[1]).unwrap();
        prop_assert!(max_diff(&contract_left(&j, dl, dr, &opl), &viaj) < 1e-12);
        let viaj = partial_trace(&(kron(&identity(dl), &opr) * &j), &[dl, dr], &[0]).unwrap();
        prop_assert!(max_diff(&contract_right(&j, dl, dr, &opr), &viaj) < 1e-12);
    }
}

#[test]
fn dual_map_is_adjoint() {
    for seed in 0..60u64 {
        let (din, dout) = (2 + (seed % 3) as usize, 1 + (seed % 4) as usize);
        let k = (1 + (seed % 5) as usize).max(din.div_ceil(dout));
        let ch = random_channel(seed, din, dout, k).unwrap();
        let x = ginibre(seed + 100, din, din);
        let y = ginibre(seed + 200, dout, dout);
        let lhs = trace_product(&y, &ch.apply_matrix(&x).unwrap());
        let rhs = trace_product(&ch.dual_matrix(&y).unwrap(), &x);
        assert!((lhs - rhs).norm() < 1e-12, "seed {seed}: {lhs} vs {rhs}");
    }
}

#[test]
fn dual_map_is_unital() {
    for seed in 0..20u64 {
        let ch = random_channel(seed, 3, 2, 3).unwrap();
        assert!(max_diff(&ch.dual_matrix(&identity(2)).unwrap(), &identity(3)) < 1e-12);
    }
}

#[test]
fn spectra_of_states_are_nonnegative() {
    for seed in 0..50u64 {
        let d = 2 + (seed % 7) as usize;
        let rho = random_density(seed, d, 1 + (seed as usize % d)).unwrap();
        let spec = spectral_decompose(rho.matrix()).unwrap();
        assert!(spec.min() >= -1e-10);
        let rebuilt = spec.rebuild(|l| l);
        assert!(max_diff(&rebuilt, rho.matrix()) < 1e-10);
    }
}

#[test]
fn constructors_reject_bad_inputs() {
    let mut m = identity(2).scale(0.5);
    m[(0, 1)] = c(0.1, 0.0);
    assert!(matches!(
        DensityOperator::new(m, vec![2]),
        Err(Error::NotHermitian(_))
    ));

    let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.2, 0.0),
        c(-0.2, 0.0),
    ]));
    assert!(matches!(
        DensityOperator::new(neg, vec![2]),
        Err(Error::NotPositive(_))
    ));
    assert!(matches!(
        DensityOperator::new(identity(2), vec![2]),
        Err(Error::Trace(_))
    ));
    assert!(DensityOperator::new(identity(4).scale(0.25), vec![2, 3]).is_err());

    let half = identity(2).scale(0.5);
    assert!(matches!(
        Povm::new(vec![half.clone(), half.scale(0.9)]),
        Err(Error::Incomplete(_))
    ));
    assert!(Povm::new(vec![identity(2).scale(1.5), identity(2).scale(-0.5)]).is_err());
    assert!(Povm::new(vec![half.clone(), half]).is_ok());

    assert!(matches!(
        KrausChannel::new(vec![identity(2).scale(0.9)]),
        Err(Error::NotTracePreserving(_))
    ));
}

#[test]
fn near_tolerance_inputs_accepted() {
    let mut m = identity(2).scale(0.5);
    m[(0, 0)] += c(1e-12, 0.0);
    m[(1, 1)] -= c(1e-12, 0.0);
    assert!(DensityOperator::new(hermitian_part(&m), vec![2]).is_ok());
    assert!(min_eigenvalue(&m).unwrap() > 0.49);
}
