use crate::engine::{OutcomeDistribution, Strategy};
use crate::error::{dim_err, invalid, Result};
use crate::games::Game;
use crate::qcore::linalg::{tensor, tensor_all, trace_product};
use crate::qcore::random::{random_channel_with, random_distribution_with, rng_for};
use crate::qcore::{CMatrix, DensityOperator, KrausChannel, Povm};

const WEIGHT_TOL: f64 = 1e-12;

/// One branch `ν_j (E_j ⊗ F_j)` of a local map with shared randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct LosrBranch {
    pub weight: f64,
    pub alice: KrausChannel,
    pub bob: KrausChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LosrMap {
    branches: Vec<LosrBranch>,
}

impl LosrMap {
    pub fn new(branches: Vec<LosrBranch>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| invalid("LOSR map needs at least one branch"))?;
        let dims = |b: &LosrBranch| (b.alice.d_in(), b.alice.d_out(), b.bob.d_in(), b.bob.d_out());
        let want = dims(first);
        if branches.iter().any(|b| dims(b) != want) {
            return Err(dim_err("LOSR branches act on different dimensions"));
        }
        if let Some(b) = branches.iter().find(|b| !(b.weight > 0.0)) {
            return Err(invalid(format!(
                "branch weight {} is not positive",
                b.weight
            )));
        }
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid(format!("branch weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn identity(da: usize, db: usize) -> Self {
        Self {
            branches: vec![LosrBranch {
                weight: 1.0,
                alice: KrausChannel::identity(da),
                bob: KrausChannel::identity(db),
            }],
        }
    }

    pub fn branches(&self) -> &[LosrBranch] {
        &self.branches
    }

    /// `(d_A in, d_A out, d_B in, d_B out)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        let b = &self.branches[0];
        (b.alice.d_in(), b.alice.d_out(), b.bob.d_in(), b.bob.d_out())
    }
}

/// `Σ_j ν_j (E_j ⊗ F_j)(ρ)`.
pub fn apply_losr(map: &LosrMap, rho: &DensityOperator) -> Result<DensityOperator> {
    let (da, db) = rho.bipartite_dims()?;
    let (ai, ao, bi, bo) = map.dims();
    if (ai, bi) != (da, db) {
        return Err(dim_err(format!(
            "map takes {ai}x{bi} but the state is {da}x{db}"
        )));
    }
    let mut out = CMatrix::zeros(ao * bo, ao * bo);
    for b in map.branches() {
        out += b
            .alice
            .tensor(&b.bob)
            .apply_matrix(rho.matrix())?
            .scale(b.weight);
    }
    DensityOperator::new(out, vec![ao, bo])
}

/// Joint POVM `J^{xy} = Σ_j ν_j (1⊗E_j)†(P^x) ⊗ (F_j⊗1)†(Q^y)` on
/// `A0 A B B0`, indexed `x·|Y| + y`. Measuring it on the unprocessed
/// state gives the statistics of `strat` after the map.
pub fn cheat_povm(map: &LosrMap, strat: &Strategy, d_a0: usize, d_b0: usize) -> Result<Povm> {
    let (_, ao, _, bo) = map.dims();
    if strat.alice.dim() != d_a0 * ao || strat.bob.dim() != bo * d_b0 {
        return Err(dim_err("strategy does not act on the map's output systems"));
    }
    let (nx, ny) = (strat.alice.len(), strat.bob.len());
    let mut joint: Vec<CMatrix> = Vec::with_capacity(nx * ny);
    let duals = map
        .branches()
        .iter()
        .map(|b| {
            let ea = KrausChannel::identity(d_a0).tensor(&b.alice);
            let fb = b.bob.tensor(&KrausChannel::identity(d_b0));
            let ps = strat
                .alice
                .effects()
                .iter()
                .map(|p| ea.dual_matrix(p))
                .collect::<Result<Vec<_>>>()?;
            let qs = strat
                .bob
                .effects()
                .iter()
                .map(|q| fb.dual_matrix(q))
                .collect::<Result<Vec<_>>>()?;
            Ok((b.weight, ps, qs))
        })
        .collect::<Result<Vec<_>>>()?;
    for x in 0..nx {
        for y in 0..ny {
            let mut j: Option<CMatrix> = None;
            for (w, ps, qs) in &duals {
                let term = tensor(&ps[x], &qs[y]).scale(*w);
                j = Some(match j {
                    Some(acc) => acc + term,
                    None => term,
                });
            }
            joint.push(j.expect("at least one branch"));
        }
    }
    Povm::new(joint)
}

/// `Tr[J^{xy} (τ^s ⊗ ρ ⊗ ω^t)]` by direct evaluation on the full space.
pub fn cheat_distribution(
    game: &Game,
    rho: &DensityOperator,
    joint: &Povm,
) -> Result<OutcomeDistribution> {
    let [ns, nt, nx, ny] = game.payoff().shape();
    let d = game.alice().dim() * rho.dim() * game.bob().dim();
    if joint.len() != nx * ny || joint.dim() != d {
        return Err(dim_err("joint POVM does not match the game and state"));
    }
    let mut values = Vec::with_capacity(ns * nt * nx * ny);
    for s in 0..ns {
        for t in 0..nt {
            let full = tensor_all(&[game.alice().state(s), rho.matrix(), game.bob().state(t)]);
            for x in 0..nx {
                for y in 0..ny {
                    values.push(trace_product(joint.effect(x * ny + y), &full).re);
                }
            }
        }
    }
    Ok(OutcomeDistribution {
        shape: [ns, nt, nx, ny],
        values,
    })
}

/// Seeded random map with `n_branches` branches of random channels with
/// `n_kraus` Kraus operators each.
pub fn random_losr(
    seed: u64,
    n_branches: usize,
    da: usize,
    db: usize,
    n_kraus: usize,
) -> Result<LosrMap> {
    if n_branches == 0 {
        return Err(invalid("LOSR map needs at least one branch"));
    }
    let mut rng = rng_for(seed, 0);
    let weights = random_distribution_with(&mut rng, n_branches);
    let branches = weights
        .into_iter()
        .map(|weight| {
            Ok(LosrBranch {
                weight,
                alice: random_channel_with(&mut rng, da, da, n_kraus)?,
                bob: random_channel_with(&mut rng, db, db, n_kraus)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LosrMap::new(branches)
}
