//! Exact outcome distributions and average payoffs.
//!
//! `μ(x,y|s,t) = Tr[(P^x ⊗ Q^y)(τ^s ⊗ ρ ⊗ ω^t)]` is evaluated by first
//! contracting each party's effect with its question state,
//! `K_{s,x} = Tr_{A0}[P^x (τ^s ⊗ 1)]` and `L_{t,y} = Tr_{B0}[Q^y (1 ⊗ ω^t)]`,
//! and then taking `Tr[(K_{s,x} ⊗ L_{t,y}) ρ]`.

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Result};
use crate::games::{Game, GameKind, QuestionEnsemble};
use crate::qcore::linalg::{
    contract_left, contract_right, hermitian_part, identity, tensor, trace_product,
};
use crate::qcore::{CMatrix, DensityOperator, Povm};

/// Alice's POVM on `A0 ⊗ A` and Bob's on `B ⊗ B0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub alice: Povm,
    pub bob: Povm,
}

impl Strategy {
    pub fn new(alice: Povm, bob: Povm) -> Self {
        Self { alice, bob }
    }

    /// Checks POVM dimensions and outcome counts against `game` and `rho`.
    pub fn check(&self, game: &Game, rho: &DensityOperator) -> Result<()> {
        let (da, db) = rho.bipartite_dims()?;
        let want_a = game.alice().dim() * da;
        let want_b = db * game.bob().dim();
        if self.alice.dim() != want_a || self.bob.dim() != want_b {
            return Err(dim_err(format!(
                "strategy acts on {}x{} but game and state need {}x{}",
                self.alice.dim(),
                self.bob.dim(),
                want_a,
                want_b
            )));
        }
        if self.alice.len() != game.n_x() || self.bob.len() != game.n_y() {
            return Err(dim_err(format!(
                "strategy has {}x{} outcomes but the game has {}x{}",
                self.alice.len(),
                self.bob.len(),
                game.n_x(),
                game.n_y()
            )));
        }
        Ok(())
    }
}

/// Conditional distribution `μ(x,y|s,t)` stored in `[s][t][x][y]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub shape: [usize; 4],
    pub values: Vec<f64>,
}

impl OutcomeDistribution {
    fn zeros(shape: [usize; 4]) -> Self {
        Self {
            shape,
            values: vec![0.0; shape.iter().product()],
        }
    }

    fn index(&self, s: usize, t: usize, x: usize, y: usize) -> usize {
        let [_, nt, nx, ny] = self.shape;
        ((s * nt + t) * nx + x) * ny + y
    }

    pub fn get(&self, s: usize, t: usize, x: usize, y: usize) -> f64 {
        self.values[self.index(s, t, x, y)]
    }

    fn set(&mut self, s: usize, t: usize, x: usize, y: usize, v: f64) {
        let i = self.index(s, t, x, y);
        self.values[i] = v;
    }

    /// Largest `|Σ_{x,y} μ(x,y|s,t) − 1|` over all question pairs.
    pub fn normalization_error(&self) -> f64 {
        let [ns, nt, nx, ny] = self.shape;
        let mut err = 0.0_f64;
        for s in 0..ns {
            for t in 0..nt {
                let total: f64 = (0..nx)
                    .flat_map(|x| (0..ny).map(move |y| (x, y)))
                    .map(|(x, y)| self.get(s, t, x, y))
                    .sum();
                err = err.max((total - 1.0).abs());
            }
        }
        err
    }

    /// Nested `[s][t][x][y]` arrays, for output.
    pub fn nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let [ns, nt, nx, ny] = self.shape;
        (0..ns)
            .map(|s| {
                (0..nt)
                    .map(|t| {
                        (0..nx)
                            .map(|x| (0..ny).map(|y| self.get(s, t, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// `K_{s,x} = Tr_{A0}[P^x (τ^s ⊗ 1_A)]`, indexed `[s][x]`.
pub fn alice_kernels(questions: &QuestionEnsemble, povm: &Povm, d_a: usize) -> Vec<Vec<CMatrix>> {
    let d0 = questions.dim();
    (0..questions.len())
        .map(|s| {
            povm.effects()
                .iter()
                .map(|p| hermitian_part(&contract_left(p, d0, d_a, questions.state(s))))
                .collect()
        })
        .collect()
}

/// `L_{t,y} = Tr_{B0}[Q^y (1_B ⊗ ω^t)]`, indexed `[t][y]`.
pub fn bob_kernels(questions: &QuestionEnsemble, povm: &Povm, d_b: usize) -> Vec<Vec<CMatrix>> {
    let d0 = questions.dim();
    (0..questions.len())
        .map(|t| {
            povm.effects()
                .iter()
                .map(|q| hermitian_part(&contract_right(q, d_b, d0, questions.state(t))))
                .collect()
        })
        .collect()
}

pub fn mu(game: &Game, rho: &DensityOperator, strat: &Strategy) -> Result<OutcomeDistribution> {
    strat.check(game, rho)?;
    let (da, db) = rho.bipartite_dims()?;
    let ka = alice_kernels(game.alice(), &strat.alice, da);
    let kb = bob_kernels(game.bob(), &strat.bob, db);
    let mut out = OutcomeDistribution::zeros(game.payoff().shape());
    for (s, row_a) in ka.iter().enumerate() {
        for (t, row_b) in kb.iter().enumerate() {
            for (x, k) in row_a.iter().enumerate() {
                for (y, l) in row_b.iter().enumerate() {
                    out.set(s, t, x, y, trace_product(&tensor(k, l), rho.matrix()).re);
                }
            }
        }
    }
    Ok(out)
}

/// `Σ ℘(s,t,x,y) p(s) q(t) μ(x,y|s,t)`.
pub fn payoff_of(game: &Game, dist: &OutcomeDistribution) -> f64 {
    let [ns, nt, nx, ny] = game.payoff().shape();
    let p = game.alice().probs();
    let q = game.bob().probs();
    let mut total = 0.0;
    for s in 0..ns {
        for t in 0..nt {
            let w = p[s] * q[t];
            for x in 0..nx {
                for y in 0..ny {
                    total += w * game.payoff().get(s, t, x, y) * dist.get(s, t, x, y);
                }
            }
        }
    }
    total
}

pub fn average_payoff(game: &Game, rho: &DensityOperator, strat: &Strategy) -> Result<f64> {
    Ok(payoff_of(game, &mu(game, rho, strat)?))
}

/// Lifts per-setting POVMs `P^x(s)` on a party's share to a single POVM on
/// the question system and share: `Σ_s Π_s ⊗ P^x(s)` where `Π_s` is the
/// support projector of question `s`. Any part of the question space not
/// covered by a question is measured with setting 0. `question_first`
/// selects `A0 ⊗ A` (Alice) versus `B ⊗ B0` (Bob) ordering.
pub fn lift_settings(
    questions: &QuestionEnsemble,
    settings: &[Povm],
    question_first: bool,
) -> Result<Povm> {
    if settings.len() != questions.len() {
        return Err(dim_err(format!(
            "{} setting POVMs for {} questions",
            settings.len(),
            questions.len()
        )));
    }
    let d0 = questions.dim();
    let d = settings[0].dim();
    let m = settings[0].len();
    if settings.iter().any(|p| p.dim() != d || p.len() != m) {
        return Err(dim_err(
            "setting POVMs differ in dimension or outcome count",
        ));
    }
    let projectors: Vec<CMatrix> = (0..questions.len())
        .map(|s| questions.support_projector(s))
        .collect();
    let covered = projectors
        .iter()
        .fold(CMatrix::zeros(d0, d0), |acc, p| acc + p);
    let rest = identity(d0) - covered;
    let join = |a: &CMatrix, b: &CMatrix| {
        if question_first {
            tensor(a, b)
        } else {
            tensor(b, a)
        }
    };
    let effects = (0..m)
        .map(|x| {
            let mut e = join(&rest, settings[0].effect(x));
            for (s, proj) in projectors.iter().enumerate() {
                e += join(proj, settings[s].effect(x));
            }
            e
        })
        .collect();
    Povm::new(effects)
}

/// `p(x,y|s,t) = Tr[(P^x(s) ⊗ Q^y(t)) ρ]` for a Bell game.
pub fn correlation(
    game: &Game,
    rho: &DensityOperator,
    alice_settings: &[Povm],
    bob_settings: &[Povm],
) -> Result<OutcomeDistribution> {
    game.require_kind(GameKind::Bell)?;
    let (da, db) = rho.bipartite_dims()?;
    if alice_settings.len() != game.n_s() || bob_settings.len() != game.n_t() {
        return Err(dim_err("one POVM per question is required on each side"));
    }
    for p in alice_settings {
        if p.dim() != da || p.len() != game.n_x() {
            return Err(dim_err(
                "Alice setting POVM does not match state or outcomes",
            ));
        }
    }
    for q in bob_settings {
        if q.dim() != db || q.len() != game.n_y() {
            return Err(dim_err("Bob setting POVM does not match state or outcomes"));
        }
    }
    let mut out = OutcomeDistribution::zeros(game.payoff().shape());
    for (s, ps) in alice_settings.iter().enumerate() {
        for (t, qt) in bob_settings.iter().enumerate() {
            for (x, px) in ps.effects().iter().enumerate() {
                for (y, qy) in qt.effects().iter().enumerate() {
                    out.set(s, t, x, y, trace_product(&tensor(px, qy), rho.matrix()).re);
                }
            }
        }
    }
    Ok(out)
}
