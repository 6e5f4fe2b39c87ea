//! Exact classical bounds by enumeration, and the separable search.

use crate::error::{Error, Result};
use crate::games::{Game, GameKind};
use crate::qcore::{CMatrix, DensityOperator};

use super::povm_opt::optimal_povm;
use super::seesaw::{seesaw_with, SeesawOptions};
use super::{BoundMethod, BoundResult, Certificate, GameResult};

/// Largest strategy space the enumerations accept.
pub const DEFAULT_CAP: u128 = 10_000_000;

fn space_size(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

fn check_cap(size: u128, cap: u128) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    Ok(())
}

/// Mixed-radix counter over functions `{0..len} → {0..base}`.
fn next_function(f: &mut [usize], base: usize) -> bool {
    for v in f.iter_mut() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

pub fn lhv_bound(game: &Game) -> Result<BoundResult> {
    lhv_bound_capped(game, DEFAULT_CAP)
}

/// Maximum over all deterministic answer functions. Bob's answers are
/// chosen per question for each of Alice's functions; ties go to the
/// smallest answer and to the first function in counting order.
pub fn lhv_bound_capped(game: &Game, cap: u128) -> Result<BoundResult> {
    game.require_kind(GameKind::Bell)?;
    let [ns, nt, nx, ny] = game.payoff().shape();
    let size = space_size(nx, ns).saturating_mul(space_size(ny, nt));
    check_cap(size, cap)?;
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let mut f = vec![0; ns];
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    loop {
        let mut total = 0.0;
        let mut g = vec![0; nt];
        for (t, gt) in g.iter_mut().enumerate() {
            let mut top = f64::NEG_INFINITY;
            for y in 0..ny {
                let v: f64 = (0..ns)
                    .map(|s| p[s] * q[t] * game.payoff().get(s, t, f[s], y))
                    .sum();
                if v > top {
                    top = v;
                    *gt = y;
                }
            }
            total += top;
        }
        if best.as_ref().is_none_or(|(b, _, _)| total > *b) {
            best = Some((total, f.clone(), g));
        }
        if !next_function(&mut f, nx) {
            break;
        }
    }
    let (value, alice, bob) = best.expect("at least one function");
    Ok(BoundResult {
        value,
        method: BoundMethod::EnumerationExact,
        certificate: Certificate::Deterministic { alice, bob },
    })
}

/// Bob's rewards `R_f^y = Σ_{s,t} p(s)q(t)℘(s,t,f(s),y) ω^t` when Alice
/// answers `f(s)` deterministically.
pub fn lhs_rewards(game: &Game, f: &[usize]) -> Vec<CMatrix> {
    let [ns, nt, _, ny] = game.payoff().shape();
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let d = game.bob().dim();
    (0..ny)
        .map(|y| {
            let mut r = CMatrix::zeros(d, d);
            for t in 0..nt {
                let w: f64 = (0..ns)
                    .map(|s| p[s] * q[t] * game.payoff().get(s, t, f[s], y))
                    .sum();
                if w != 0.0 {
                    r += game.bob().state(t).scale(w);
                }
            }
            r
        })
        .collect()
}

pub fn lhs_bound(game: &Game) -> Result<BoundResult> {
    lhs_bound_capped(game, DEFAULT_CAP)
}

/// Maximum over Alice's deterministic answers `f` of Bob's best measurement
/// value on `lhs_rewards`. Exact when Bob has two outcomes; with more the
/// inner step is a search and the result is flagged as such.
pub fn lhs_bound_capped(game: &Game, cap: u128) -> Result<BoundResult> {
    game.require_kind(GameKind::SteeringAliceUntrusted)?;
    let [ns, _, nx, _] = game.payoff().shape();
    check_cap(space_size(nx, ns), cap)?;
    let mut f = vec![0; ns];
    let mut best: Option<BoundResult> = None;
    loop {
        let (povm, value, method) = optimal_povm(&lhs_rewards(game, &f))?;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(BoundResult {
                value,
                method,
                certificate: Certificate::LocalHiddenState {
                    alice: f.clone(),
                    bob: povm,
                },
            });
        }
        if !next_function(&mut f, nx) {
            break;
        }
    }
    Ok(best.expect("at least one function"))
}

/// Seesaw lower estimate of the best payoff with a product state. Pure
/// product states can be absorbed into the measurements, so the search runs
/// on the one-dimensional state.
pub fn separable_bound(game: &Game, restarts: usize, seed: u64) -> Result<BoundResult> {
    Ok(separable_bound_with(game, &SeesawOptions::new(restarts, seed))?.0)
}

/// As [`separable_bound`], also returning the underlying search.
pub fn separable_bound_with(
    game: &Game,
    opts: &SeesawOptions,
) -> Result<(BoundResult, GameResult)> {
    let state = DensityOperator::trivial();
    let res = seesaw_with(game, &state, opts)?;
    let bound = BoundResult {
        value: res.value,
        method: BoundMethod::SearchLowerBound,
        certificate: Certificate::ProductState {
            state,
            strategy: res.strategy.clone(),
        },
    };
    Ok((bound, res))
}
