//! Witness checks: does a state beat a classical bound on a game?

use serde::{Deserialize, Serialize};

use crate::engine::Strategy;
use crate::error::{invalid, Result};
use crate::games::Game;
use crate::qcore::DensityOperator;

use super::seesaw::{seesaw_with, SeesawOptions};
use super::{BoundMethod, BoundResult};

pub const DEFAULT_MARGIN: f64 = 1e-6;

/// A bound whose certificate no longer reproduces its value on the given
/// game was computed for some other game.
const BOUND_MATCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Witnessed,
    NotWitnessed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub verdict: Verdict,
    pub seesaw_value: f64,
    pub bound_value: f64,
    pub bound_method: BoundMethod,
    pub margin: f64,
    pub strategy: Strategy,
}

pub fn witness_check(
    game: &Game,
    rho: &DensityOperator,
    bound: &BoundResult,
    restarts: usize,
    seed: u64,
) -> Result<WitnessReport> {
    witness_check_with(
        game,
        rho,
        bound,
        &SeesawOptions::new(restarts, seed),
        DEFAULT_MARGIN,
    )
}

pub fn witness_check_with(
    game: &Game,
    rho: &DensityOperator,
    bound: &BoundResult,
    opts: &SeesawOptions,
    margin: f64,
) -> Result<WitnessReport> {
    if !bound.applies_to(game.kind()) {
        return Err(invalid(format!(
            "bound certificate does not apply to a {} game",
            game.kind()
        )));
    }
    let check = bound
        .reevaluate(game)
        .map_err(|e| invalid(format!("bound was computed for a different game: {e}")))?;
    if (check - bound.value).abs() > BOUND_MATCH_TOL {
        return Err(invalid(format!(
            "bound was computed for a different game (certificate gives {check}, bound says {})",
            bound.value
        )));
    }
    let res = seesaw_with(game, rho, opts)?;
    let verdict = if res.value > bound.value + margin {
        Verdict::Witnessed
    } else {
        Verdict::NotWitnessed
    };
    Ok(WitnessReport {
        verdict,
        seesaw_value: res.value,
        bound_value: bound.value,
        bound_method: bound.method,
        margin,
        strategy: res.strategy,
    })
}
