mod common;

use common::{
    all_functions, brute_lhv, random_bipartite, random_ensemble, random_semiquantum, random_table,
};
use qgames::bounds::{
    lhs_bound, lhv_bound, lhv_bound_capped, optimal_binary_povm, optimal_povm, povm_value,
    random_projective, seesaw, separable_bound, witness_check, BoundMethod, Certificate, Verdict,
};
use qgames::fixtures::{semiquantum_game, steering_game};
use qgames::games::{bell_game_from_inequality, chsh_game, make_game, Game, QuestionEnsemble};
use qgames::qcore::linalg::{hermitian_part, trace_product};
use qgames::qcore::random::{ginibre_with, rng_for};
use qgames::qcore::{random_povm, CMatrix, DensityOperator, Povm};
use qgames::states::{random_separable, singlet, werner_state};
use qgames::Error;

fn random_hermitian(seed: u64, d: usize) -> CMatrix {
    let g = ginibre_with(&mut rng_for(seed, 0), d, d);
    hermitian_part(&g)
}

#[test]
fn lhv_matches_exhaustive_search() {
    for seed in 0..25u64 {
        let shape = [
            2 + (seed % 2) as usize,
            2 + (seed % 3 == 1) as usize,
            2 + (seed % 4 == 0) as usize,
            2,
        ];
        let w = random_table(seed, shape, 1.0);
        let p = vec![1.0 / shape[0] as f64; shape[0]];
        let q = vec![1.0 / shape[1] as f64; shape[1]];
        let game = bell_game_from_inequality(&w, &p, &q).unwrap();
        let b = lhv_bound(&game).unwrap();
        assert_eq!(b.method, BoundMethod::EnumerationExact);
        assert!((b.value - brute_lhv(&game)).abs() < 1e-12, "seed {seed}");
        assert!((b.reevaluate(&game).unwrap() - b.value).abs() < 1e-10);
    }
}

#[test]
fn lhv_cap() {
    assert!(matches!(
        lhv_bound_capped(&chsh_game(), 15),
        Err(Error::CapExceeded { size: 16, cap: 15 })
    ));
    assert!(lhv_bound_capped(&chsh_game(), 16).is_ok());
}

#[test]
fn binary_optimum_dominates_random_measurements() {
    for seed in 0..20u64 {
        let d = 2 + (seed % 3) as usize;
        let r = [random_hermitian(seed, d), random_hermitian(seed + 500, d)];
        let (best, value) = optimal_binary_povm(&r[0], &r[1]).unwrap();
        assert!((povm_value(&best, &r) - value).abs() < 1e-12);
        for k in 0..300u64 {
            let p = random_povm(seed * 1000 + k, d, 2).unwrap();
            assert!(povm_value(&p, &r) <= value + 1e-12);
        }
        // the general entry point takes the exact two-outcome path
        let (p, v, method) = optimal_povm(&r).unwrap();
        assert_eq!(method, BoundMethod::EnumerationExact);
        assert!((v - value).abs() < 1e-12);
        assert!((povm_value(&p, &r) - v).abs() < 1e-12);
    }
}

#[test]
fn multi_outcome_search_dominates_random_measurements() {
    for seed in 0..10u64 {
        let r: Vec<CMatrix> = (0..3).map(|k| random_hermitian(seed * 3 + k, 3)).collect();
        let (p, v, method) = optimal_povm(&r).unwrap();
        assert_eq!(method, BoundMethod::SearchLowerBound);
        assert!((povm_value(&p, &r) - v).abs() < 1e-10);
        for k in 0..300u64 {
            assert!(povm_value(&random_povm(seed * 1000 + k, 3, 3).unwrap(), &r) <= v + 1e-9);
        }
    }
}

/// `Σ p q ℘(s,t,f(s),y) Tr[Q^y ω^t]` for a deterministic Alice and a
/// measurement on Bob's question alone.
fn lhs_value(game: &Game, f: &[usize], bob: &Povm) -> f64 {
    let [_, _, _, ny] = game.payoff().shape();
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let mut v = 0.0;
    for (s, ps) in p.iter().enumerate() {
        for (t, qt) in q.iter().enumerate() {
            for y in 0..ny {
                let pr = trace_product(bob.effect(y), game.bob().state(t)).re;
                v += ps * qt * game.payoff().get(s, t, f[s], y) * pr;
            }
        }
    }
    v
}

#[test]
fn lhs_bound_dominates_random_lhs_strategies() {
    let game = steering_game();
    let b = lhs_bound(&game).unwrap();
    assert_eq!(b.method, BoundMethod::EnumerationExact);
    assert!((b.value - (2f64.sqrt() - 1.25)).abs() < 1e-9);
    let fs = all_functions(2, 2);
    let mut rng = rng_for(11, 0);
    let mut best = f64::NEG_INFINITY;
    for k in 0..5000u64 {
        let f = &fs[(k % 4) as usize];
        best = best.max(lhs_value(&game, f, &random_povm(k, 2, 2).unwrap()));
        best = best.max(lhs_value(
            &game,
            f,
            &random_projective(&mut rng, 2, 2).unwrap(),
        ));
    }
    assert!(best <= b.value + 1e-12);
    assert!(best > b.value - 0.05, "search came nowhere near: {best}");
    // constant answers are LHS strategies too
    for f in &fs {
        for y in 0..2 {
            let mut e = vec![CMatrix::zeros(2, 2); 2];
            e[y] = CMatrix::identity(2, 2);
            assert!(lhs_value(&game, f, &Povm::new(e).unwrap()) <= b.value + 1e-12);
        }
    }
    if let Certificate::LocalHiddenState { alice, bob } = &b.certificate {
        assert!((lhs_value(&game, alice, bob) - b.value).abs() < 1e-10);
    } else {
        panic!("wrong certificate kind");
    }
}

#[test]
fn lhs_bound_on_random_steering_games() {
    for seed in 0..10u64 {
        let game = make_game(
            QuestionEnsemble::computational(vec![0.5, 0.5]).unwrap(),
            random_ensemble(seed, 3, 2),
            random_table(seed, [2, 3, 2, 2], 2.0),
        )
        .unwrap();
        let b = lhs_bound(&game).unwrap();
        assert!((b.reevaluate(&game).unwrap() - b.value).abs() < 1e-10);
        for k in 0..200u64 {
            let f = &all_functions(2, 2)[(k % 4) as usize];
            assert!(
                lhs_value(&game, f, &random_povm(seed * 1000 + k, 2, 2).unwrap())
                    <= b.value + 1e-12
            );
        }
    }
}

#[test]
fn chsh_chain_of_bounds() {
    let game = chsh_game();
    let lhv = lhv_bound(&game).unwrap();
    let sep = separable_bound(&game, 5, 0).unwrap();
    let q = seesaw(&game, &singlet(), 10, 0).unwrap();
    assert_eq!(lhv.value, 2.0);
    assert!(lhv.value <= sep.value + 1e-6);
    assert!(sep.value <= q.value);
    assert!(q.value >= 2.0 * 2f64.sqrt() - 1e-3);
    assert!((sep.reevaluate(&game).unwrap() - sep.value).abs() < 1e-10);
}

#[test]
fn entangled_state_never_loses_to_separable() {
    let battery = [
        chsh_game(),
        steering_game(),
        semiquantum_game(),
        random_semiquantum(9, [2, 2, 2, 2], 2),
    ];
    for (i, game) in battery.iter().enumerate() {
        let top = seesaw(game, &singlet(), 6, i as u64).unwrap().value;
        for k in 0..3u64 {
            let (sigma, _) = random_separable(100 + k, 3).unwrap();
            let v = seesaw(game, &sigma, 6, k).unwrap().value;
            assert!(top + 1e-6 >= v, "game {i}, state {k}: {top} < {v}");
        }
    }
}

#[test]
fn seesaw_traces_are_monotone_and_deterministic() {
    for seed in 0..6u64 {
        let game = random_semiquantum(seed, [2, 2, 2, 2 + (seed % 2) as usize], 2);
        let rho = random_bipartite(seed, 2, 2, 2);
        let r = seesaw(&game, &rho, 3, seed).unwrap();
        assert_eq!(r.traces.len(), 3);
        for t in &r.traces {
            assert!(t.windows(2).all(|w| w[1] >= w[0] - 1e-10));
        }
        assert_eq!(*r.best_trace().last().unwrap(), r.value);
        assert!(r.traces.iter().all(|t| *t.last().unwrap() <= r.value));
        assert_eq!(seesaw(&game, &rho, 3, seed).unwrap(), r);
    }
}

#[test]
fn witness_verdicts() {
    let chsh = chsh_game();
    let lhv = lhv_bound(&chsh).unwrap();
    let rep = witness_check(&chsh, &singlet(), &lhv, 5, 0).unwrap();
    assert_eq!(rep.verdict, Verdict::Witnessed);
    let rep = witness_check(&chsh, &werner_state(0.6).unwrap(), &lhv, 5, 0).unwrap();
    assert_eq!(rep.verdict, Verdict::NotWitnessed);
    let rep = witness_check(
        &chsh,
        &DensityOperator::maximally_mixed(vec![2, 2]),
        &lhv,
        5,
        0,
    )
    .unwrap();
    assert_eq!(rep.verdict, Verdict::NotWitnessed);

    let steer = steering_game();
    let lhs = lhs_bound(&steer).unwrap();
    let rep = witness_check(&steer, &singlet(), &lhs, 5, 0).unwrap();
    assert_eq!(rep.verdict, Verdict::Witnessed);
    assert!(rep.seesaw_value - rep.bound_value >= 0.05);

    // a bound from another game is refused
    assert!(witness_check(&semiquantum_game(), &singlet(), &lhv, 2, 0).is_err());
    let scaled = chsh.with_payoff(chsh.payoff().scaled(2.0)).unwrap();
    assert!(witness_check(&scaled, &singlet(), &lhv, 2, 0).is_err());
}

#[test]
fn bound_kinds_are_enforced() {
    assert!(lhs_bound(&chsh_game()).is_err());
    assert!(lhv_bound(&steering_game()).is_err());
    assert!(lhv_bound(&semiquantum_game()).is_err());
    let sep = separable_bound(&semiquantum_game(), 4, 0).unwrap();
    assert!((sep.value - 2.0).abs() < 1e-6);
}
