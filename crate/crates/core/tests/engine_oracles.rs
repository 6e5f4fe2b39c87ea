mod common;

use common::{
    brute_mu, brute_payoff, random_bipartite, random_semiquantum, random_strategy, random_table,
};
use proptest::prelude::*;
use qgames::engine::{average_payoff, mu, payoff_of};
use qgames::fixtures::{semiquantum_game, steering_game};
use qgames::games::chsh_game;
use qgames::qcore::DensityOperator;
use qgames::states::singlet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mu_matches_full_space_trace(seed in 0u64..100_000, nx in 2usize..4, ny in 2usize..4, da in 1usize..3, db in 1usize..4) {
        let game = random_semiquantum(seed, [2, 3, nx, ny], 2);
        let rho = random_bipartite(seed, da, db, da * db);
        let strat = random_strategy(seed, &game, da, db);
        let ours = mu(&game, &rho, &strat).unwrap();
        let want = brute_mu(&game, &rho, &strat);
        for (a, b) in ours.values.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let v = average_payoff(&game, &rho, &strat).unwrap();
        prop_assert!((v - brute_payoff(&game, &rho, &strat)).abs() < 1e-11);
        prop_assert!((v - payoff_of(&game, &ours)).abs() < 1e-12);
    }
}

#[test]
fn mu_is_a_conditional_distribution() {
    for seed in 0..100u64 {
        let (da, db) = (1 + (seed % 2) as usize, 1 + (seed % 3) as usize);
        let game = random_semiquantum(seed, [2, 2, 2 + (seed % 2) as usize, 2], 2);
        let rho = random_bipartite(seed, da, db, 1 + (seed as usize % (da * db)));
        let strat = random_strategy(seed + 7, &game, da, db);
        let d = mu(&game, &rho, &strat).unwrap();
        assert!(d.values.iter().all(|&v| v >= -1e-12));
        assert!(d.normalization_error() < 1e-12);
    }
}

#[test]
fn payoff_is_linear_in_table() {
    for seed in 0..20u64 {
        let game = random_semiquantum(seed, [2, 2, 2, 2], 2);
        let rho = random_bipartite(seed, 2, 2, 3);
        let strat = random_strategy(seed, &game, 2, 2);
        let base = average_payoff(&game, &rho, &strat).unwrap();
        let other = random_table(seed + 99, [2, 2, 2, 2], 5.0);
        let g2 = game.with_payoff(other.clone()).unwrap();
        let sum = game
            .with_payoff(game.payoff().added(&other).unwrap())
            .unwrap();
        let v2 = average_payoff(&g2, &rho, &strat).unwrap();
        let vsum = average_payoff(&sum, &rho, &strat).unwrap();
        assert!((vsum - base - v2).abs() < 1e-12);
        let scaled = game.with_payoff(game.payoff().scaled(-2.5)).unwrap();
        assert!((average_payoff(&scaled, &rho, &strat).unwrap() + 2.5 * base).abs() < 1e-12);
    }
}

#[test]
fn payoff_is_linear_in_state() {
    for seed in 0..20u64 {
        let game = random_semiquantum(seed, [2, 2, 2, 2], 2);
        let strat = random_strategy(seed, &game, 2, 2);
        let r1 = random_bipartite(seed + 1, 2, 2, 2);
        let r2 = random_bipartite(seed + 2, 2, 2, 4);
        let r3 = singlet();
        let l = [0.2, 0.5, 0.3];
        let mix = DensityOperator::mixture(&[(l[0], &r1), (l[1], &r2), (l[2], &r3)]).unwrap();
        let want: f64 = [&r1, &r2, &r3]
            .iter()
            .zip(l)
            .map(|(r, w)| w * average_payoff(&game, r, &strat).unwrap())
            .sum();
        assert!((average_payoff(&game, &mix, &strat).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn fixtures_evaluate_through_both_paths() {
    for (i, game) in [chsh_game(), steering_game(), semiquantum_game()]
        .iter()
        .enumerate()
    {
        let rho = singlet();
        let strat = random_strategy(40 + i as u64, game, 2, 2);
        let v = average_payoff(game, &rho, &strat).unwrap();
        assert!((v - brute_payoff(game, &rho, &strat)).abs() < 1e-12);
    }
}

#[test]
fn mismatched_strategy_is_rejected() {
    let game = chsh_game();
    let strat = random_strategy(1, &game, 2, 2);
    let rho = random_bipartite(3, 2, 3, 2);
    assert!(average_payoff(&game, &rho, &strat).is_err());
    let rho = DensityOperator::maximally_mixed(vec![4]);
    assert!(average_payoff(&game, &rho, &strat).is_err());
}
