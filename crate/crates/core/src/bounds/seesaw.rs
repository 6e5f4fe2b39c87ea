//! Alternating optimization of Alice's and Bob's measurements.

use rayon::prelude::*;

use crate::engine::{alice_kernels, average_payoff, bob_kernels, Strategy};
use crate::error::{dim_err, Result};
use crate::games::Game;
use crate::qcore::linalg::{contract_left, contract_right, hermitian_part, tensor};
use crate::qcore::random::{random_unitary_with, rng_for, QRng};
use crate::qcore::{CMatrix, DensityOperator, Povm};

use super::povm_opt::improve_povm;
use super::GameResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Stop once a full sweep gains less than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            seed: 0,
            tolerance: 1e-9,
            max_sweeps: 500,
        }
    }
}

impl SeesawOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }
}

/// Alice's rewards `R^x = Σ_{s,t,y} p(s)q(t)℘(s,t,x,y) τ^s ⊗ Tr_B[ρ(1 ⊗ L_{t,y})]`
/// for Bob's measurement `bob`.
pub fn alice_rewards(game: &Game, rho: &DensityOperator, bob: &Povm) -> Result<Vec<CMatrix>> {
    let (da, db) = rho.bipartite_dims()?;
    let kb = bob_kernels(game.bob(), bob, db);
    let reduced: Vec<Vec<CMatrix>> = kb
        .iter()
        .map(|row| {
            row.iter()
                .map(|l| hermitian_part(&contract_right(rho.matrix(), da, db, l)))
                .collect()
        })
        .collect();
    let [ns, nt, nx, ny] = game.payoff().shape();
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let d0 = game.alice().dim();
    let mut out = vec![CMatrix::zeros(d0 * da, d0 * da); nx];
    for (x, rx) in out.iter_mut().enumerate() {
        for s in 0..ns {
            let mut acc = CMatrix::zeros(da, da);
            for t in 0..nt {
                for y in 0..ny {
                    let w = p[s] * q[t] * game.payoff().get(s, t, x, y);
                    if w != 0.0 {
                        acc += reduced[t][y].scale(w);
                    }
                }
            }
            *rx += tensor(game.alice().state(s), &acc);
        }
    }
    Ok(out.iter().map(hermitian_part).collect())
}

/// Bob's rewards `S^y = Σ_{s,t,x} p(s)q(t)℘(s,t,x,y) Tr_A[ρ(K_{s,x} ⊗ 1)] ⊗ ω^t`
/// for Alice's measurement `alice`.
pub fn bob_rewards(game: &Game, rho: &DensityOperator, alice: &Povm) -> Result<Vec<CMatrix>> {
    let (da, db) = rho.bipartite_dims()?;
    let ka = alice_kernels(game.alice(), alice, da);
    let reduced: Vec<Vec<CMatrix>> = ka
        .iter()
        .map(|row| {
            row.iter()
                .map(|k| hermitian_part(&contract_left(rho.matrix(), da, db, k)))
                .collect()
        })
        .collect();
    let [ns, nt, nx, ny] = game.payoff().shape();
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let d0 = game.bob().dim();
    let mut out = vec![CMatrix::zeros(db * d0, db * d0); ny];
    for (y, sy) in out.iter_mut().enumerate() {
        for t in 0..nt {
            let mut acc = CMatrix::zeros(db, db);
            for s in 0..ns {
                for x in 0..nx {
                    let w = p[s] * q[t] * game.payoff().get(s, t, x, y);
                    if w != 0.0 {
                        acc += reduced[s][x].scale(w);
                    }
                }
            }
            *sy += tensor(&acc, game.bob().state(t));
        }
    }
    Ok(out.iter().map(hermitian_part).collect())
}

/// Haar-random projective measurement; basis vector `k` goes to outcome
/// `k mod outcomes`.
pub fn random_projective(rng: &mut QRng, dim: usize, outcomes: usize) -> Result<Povm> {
    let u = random_unitary_with(rng, dim);
    let labels: Vec<usize> = (0..dim).map(|k| k % outcomes).collect();
    Povm::from_basis(&u, &labels, outcomes)
}

pub(crate) struct RestartOutcome {
    pub value: f64,
    pub strategy: Strategy,
    pub trace: Vec<f64>,
    pub converged: bool,
}

pub(crate) fn run_from(
    game: &Game,
    rho: &DensityOperator,
    mut strategy: Strategy,
    opts: &SeesawOptions,
) -> Result<RestartOutcome> {
    let mut value = average_payoff(game, rho, &strategy)?;
    let mut trace = vec![value];
    let mut converged = false;
    for _ in 0..opts.max_sweeps {
        let start = value;
        let ra = alice_rewards(game, rho, &strategy.bob)?;
        let (alice, va) = improve_povm(&ra, &strategy.alice)?;
        if va >= value {
            strategy.alice = alice;
            value = va;
        }
        trace.push(value);
        let rb = bob_rewards(game, rho, &strategy.alice)?;
        let (bob, vb) = improve_povm(&rb, &strategy.bob)?;
        if vb >= value {
            strategy.bob = bob;
            value = vb;
        }
        trace.push(value);
        if value - start < opts.tolerance {
            converged = true;
            break;
        }
    }
    Ok(RestartOutcome {
        value,
        strategy,
        trace,
        converged,
    })
}

fn run_restart(
    game: &Game,
    rho: &DensityOperator,
    opts: &SeesawOptions,
    index: usize,
) -> Result<RestartOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    let mut rng = rng_for(opts.seed, index as u64);
    let alice = random_projective(&mut rng, game.alice().dim() * da, game.n_x())?;
    let bob = random_projective(&mut rng, db * game.bob().dim(), game.n_y())?;
    run_from(game, rho, Strategy::new(alice, bob), opts)
}

/// Best value of the average payoff found by seesaw over `opts.restarts`
/// independent random starts. Restart `i` draws from stream `i` of the
/// seed; ties go to the lowest restart index.
pub fn seesaw_with(game: &Game, rho: &DensityOperator, opts: &SeesawOptions) -> Result<GameResult> {
    rho.bipartite_dims()?;
    if opts.restarts == 0 {
        return Err(dim_err("seesaw needs at least one restart"));
    }
    let runs: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| run_restart(game, rho, opts, i))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let converged = runs[best].converged;
    let value = runs[best].value;
    let strategy = runs[best].strategy.clone();
    Ok(GameResult {
        value,
        strategy,
        traces: runs.into_iter().map(|r| r.trace).collect(),
        restarts: opts.restarts,
        seed: opts.seed,
        best_restart: best,
        converged,
    })
}

pub fn seesaw(
    game: &Game,
    rho: &DensityOperator,
    restarts: usize,
    seed: u64,
) -> Result<GameResult> {
    seesaw_with(game, rho, &SeesawOptions::new(restarts, seed))
}
