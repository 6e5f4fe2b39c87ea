//! Fixed games used by the tests, the CLI and the acceptance suite.

use crate::games::{chsh_game, make_game, Game, PayoffTable, QuestionEnsemble};
use crate::qcore::DensityOperator;
use crate::states::qubit;

pub use crate::games::chsh_game as chsh;

/// `|0⟩, |1⟩, |+⟩, |−⟩` with uniform prior. Question `t` lies in basis
/// `t / 2` (Z then X) with bit `t % 2`.
pub fn bb84_ensemble() -> QuestionEnsemble {
    let kets = [qubit::zero(), qubit::one(), qubit::plus(), qubit::minus()];
    let states = kets
        .iter()
        .map(|k| DensityOperator::from_pure(k, vec![2]).expect("unit ket"))
        .collect();
    QuestionEnsemble::uniform(states).expect("valid ensemble")
}

/// `|0⟩, |+⟩` with uniform prior.
pub fn zero_plus_ensemble() -> QuestionEnsemble {
    let states = [qubit::zero(), qubit::plus()]
        .iter()
        .map(|k| DensityOperator::from_pure(k, vec![2]).expect("unit ket"))
        .collect();
    QuestionEnsemble::uniform(states).expect("valid ensemble")
}

/// Two classical settings for Alice, BB84 questions for Bob. Only Bob's
/// answer `y = 1` scores: `3` when Alice's bit matches the question bit in
/// the basis she was asked about, `−13` when it does not, nothing for the
/// other basis.
pub fn steering_game() -> Game {
    let payoff = PayoffTable::from_fn([2, 4, 2, 2], |s, t, x, y| {
        if t / 2 != s || y != 1 {
            0.0
        } else if x == t % 2 {
            3.0
        } else {
            -13.0
        }
    })
    .expect("fixed shape");
    make_game(
        QuestionEnsemble::computational(vec![0.5, 0.5]).expect("valid prior"),
        bb84_ensemble(),
        payoff,
    )
    .expect("fixture is consistent")
}

/// `|0⟩, |+⟩` questions on both sides with the CHSH sign pattern
/// `±4 (−1)^{x⊕y⊕st}`.
pub fn semiquantum_game() -> Game {
    let chsh = chsh_game();
    make_game(
        zero_plus_ensemble(),
        zero_plus_ensemble(),
        chsh.payoff().clone(),
    )
    .expect("fixture is consistent")
}
