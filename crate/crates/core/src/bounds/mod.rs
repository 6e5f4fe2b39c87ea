//! Optimal payoffs and classical bounds.

mod classical;
mod povm_opt;
mod seesaw;
mod witness;

use serde::{Deserialize, Serialize};

use crate::engine::{average_payoff, lift_settings, Strategy};
use crate::error::{dim_err, Result};
use crate::games::{Game, GameKind};
use crate::qcore::{CMatrix, DensityOperator, Povm};

pub use classical::{
    lhs_bound, lhs_bound_capped, lhs_rewards, lhv_bound, lhv_bound_capped, separable_bound,
    separable_bound_with, DEFAULT_CAP,
};
pub use povm_opt::{optimal_binary_povm, optimal_povm, povm_value, refine_povm, REFINE_TOL};
pub use seesaw::{
    alice_rewards, bob_rewards, random_projective, seesaw, seesaw_with, SeesawOptions,
};
pub use witness::{witness_check, witness_check_with, Verdict, WitnessReport, DEFAULT_MARGIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    EnumerationExact,
    SearchLowerBound,
}

impl std::fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundMethod::EnumerationExact => "enumeration-exact",
            BoundMethod::SearchLowerBound => "search-lower-bound",
        })
    }
}

/// Best strategy found by seesaw, with one payoff trace per restart.
#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub value: f64,
    pub strategy: Strategy,
    pub traces: Vec<Vec<f64>>,
    pub restarts: usize,
    pub seed: u64,
    pub best_restart: usize,
    pub converged: bool,
}

impl GameResult {
    pub fn best_trace(&self) -> &[f64] {
        &self.traces[self.best_restart]
    }
}

/// What achieves a reported bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Answer functions `x = f(s)`, `y = g(t)`.
    Deterministic { alice: Vec<usize>, bob: Vec<usize> },
    /// Alice answers `f(s)`; Bob measures his question system.
    LocalHiddenState { alice: Vec<usize>, bob: Povm },
    /// Product state shared by the players and the strategy used on it.
    ProductState {
        state: DensityOperator,
        strategy: Strategy,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub method: BoundMethod,
    pub certificate: Certificate,
}

fn deterministic_povm(
    questions: &crate::games::QuestionEnsemble,
    answers: &[usize],
    outcomes: usize,
    question_first: bool,
) -> Result<Povm> {
    let settings = answers
        .iter()
        .map(|&a| {
            if a >= outcomes {
                return Err(dim_err(format!("answer {a} outside {outcomes} outcomes")));
            }
            let mut effects = vec![CMatrix::zeros(1, 1); outcomes];
            effects[a] = crate::qcore::linalg::identity(1);
            Povm::new(effects)
        })
        .collect::<Result<Vec<_>>>()?;
    lift_settings(questions, &settings, question_first)
}

impl Certificate {
    /// State and strategy through which the certificate is evaluated.
    pub fn realize(&self, game: &Game) -> Result<(DensityOperator, Strategy)> {
        match self {
            Certificate::Deterministic { alice, bob } => {
                if alice.len() != game.n_s() || bob.len() != game.n_t() {
                    return Err(dim_err("certificate does not match the question counts"));
                }
                let p = deterministic_povm(game.alice(), alice, game.n_x(), true)?;
                let q = deterministic_povm(game.bob(), bob, game.n_y(), false)?;
                Ok((DensityOperator::trivial(), Strategy::new(p, q)))
            }
            Certificate::LocalHiddenState { alice, bob } => {
                if alice.len() != game.n_s() {
                    return Err(dim_err("certificate does not match the question counts"));
                }
                let p = deterministic_povm(game.alice(), alice, game.n_x(), true)?;
                Ok((DensityOperator::trivial(), Strategy::new(p, bob.clone())))
            }
            Certificate::ProductState { state, strategy } => Ok((state.clone(), strategy.clone())),
        }
    }

    /// Average payoff of the certificate in `game`, computed by the engine.
    pub fn evaluate(&self, game: &Game) -> Result<f64> {
        let (rho, strat) = self.realize(game)?;
        average_payoff(game, &rho, &strat)
    }
}

impl BoundResult {
    pub fn reevaluate(&self, game: &Game) -> Result<f64> {
        self.certificate.evaluate(game)
    }

    /// Which game kinds the certificate type applies to.
    pub fn applies_to(&self, kind: GameKind) -> bool {
        match self.certificate {
            Certificate::Deterministic { .. } => kind == GameKind::Bell,
            Certificate::LocalHiddenState { .. } => kind == GameKind::SteeringAliceUntrusted,
            Certificate::ProductState { .. } => true,
        }
    }
}
