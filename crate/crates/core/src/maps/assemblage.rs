use std::collections::BTreeMap;

use crate::bounds::{optimal_povm, BoundMethod};
use crate::error::{dim_err, invalid, Error, Result};
use crate::games::{Game, GameKind};
use crate::qcore::linalg::{
    contract_left, hermitian_part, hermiticity_error, max_abs_diff, min_eigenvalue, tensor,
};
use crate::qcore::{CMatrix, DensityOperator, KrausChannel, Povm};

/// Tolerance for the positivity, normalization and no-signalling checks.
pub const ASSEMBLAGE_TOL: f64 = 1e-10;

/// Unnormalized conditional states `ρ̃^{x|s}` on Bob's system.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    n_s: usize,
    n_x: usize,
    members: Vec<CMatrix>,
}

impl Assemblage {
    /// Members in `s`-major order: `members[s·|X| + x] = ρ̃^{x|s}`.
    pub fn new(n_s: usize, n_x: usize, members: Vec<CMatrix>) -> Result<Self> {
        if n_s == 0 || n_x == 0 || members.len() != n_s * n_x {
            return Err(dim_err(format!(
                "{} members for {n_s} settings and {n_x} outcomes",
                members.len()
            )));
        }
        let d = members[0].nrows();
        for (i, m) in members.iter().enumerate() {
            if !m.is_square() || m.nrows() != d {
                return Err(dim_err(format!("member {i} is not {d}x{d}")));
            }
            let herm = hermiticity_error(m);
            if herm > ASSEMBLAGE_TOL {
                return Err(Error::NotHermitian(herm));
            }
            let min = min_eigenvalue(m)?;
            if min < -ASSEMBLAGE_TOL {
                return Err(Error::NotPositive(min));
            }
        }
        let a = Self { n_s, n_x, members };
        let first = a.marginal(0);
        for s in 0..n_s {
            let tr = a.marginal(s).trace().re;
            if (tr - 1.0).abs() > ASSEMBLAGE_TOL {
                return Err(Error::Trace(tr));
            }
            let gap = max_abs_diff(&a.marginal(s), &first);
            if gap > ASSEMBLAGE_TOL {
                return Err(invalid(format!(
                    "marginal for setting {s} differs from setting 0 by {gap:e}"
                )));
            }
        }
        Ok(a)
    }

    /// Builds from a `(s, x) → member` map; every pair must be present.
    pub fn from_map(
        n_s: usize,
        n_x: usize,
        map: &BTreeMap<(usize, usize), CMatrix>,
    ) -> Result<Self> {
        let mut members = Vec::with_capacity(n_s * n_x);
        for s in 0..n_s {
            for x in 0..n_x {
                let m = map
                    .get(&(s, x))
                    .ok_or_else(|| invalid(format!("missing member ({s},{x})")))?;
                members.push(m.clone());
            }
        }
        if map.len() != members.len() {
            return Err(invalid("members outside the declared settings or outcomes"));
        }
        Self::new(n_s, n_x, members)
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn dim(&self) -> usize {
        self.members[0].nrows()
    }

    pub fn member(&self, s: usize, x: usize) -> &CMatrix {
        &self.members[s * self.n_x + x]
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    /// `Σ_x ρ̃^{x|s}`.
    pub fn marginal(&self, s: usize) -> CMatrix {
        (0..self.n_x).fold(CMatrix::zeros(self.dim(), self.dim()), |acc, x| {
            acc + self.member(s, x)
        })
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.n_s != other.n_s || self.n_x != other.n_x || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }
}

fn check_settings(measurements: &[Povm], da: usize) -> Result<usize> {
    let first = measurements
        .first()
        .ok_or_else(|| invalid("no measurement settings"))?;
    let n_x = first.len();
    if measurements.iter().any(|p| p.dim() != da || p.len() != n_x) {
        return Err(dim_err(format!(
            "settings must be {n_x}-outcome POVMs on dimension {da}"
        )));
    }
    Ok(n_x)
}

/// `ρ̃^{x|s} = Tr_A[(P^{x|s} ⊗ 1) ρ]`.
pub fn steer_assemblage(rho: &DensityOperator, measurements: &[Povm]) -> Result<Assemblage> {
    let (da, db) = rho.bipartite_dims()?;
    let n_x = check_settings(measurements, da)?;
    let members = measurements
        .iter()
        .flat_map(|p| {
            p.effects()
                .iter()
                .map(|e| hermitian_part(&contract_left(rho.matrix(), da, db, e)))
        })
        .collect();
    Assemblage::new(measurements.len(), n_x, members)
}

/// One branch `ν(i)`, Alice settings `P^{x|s}(i)`, Bob channel `F_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossrBranch {
    pub weight: f64,
    pub measurements: Vec<Povm>,
    pub bob: KrausChannel,
}

/// `Σ_i ν(i) Tr_A[(P^{x|s}(i) ⊗ F_i)(ρ)]`.
pub fn lossr_assemblage(rho: &DensityOperator, branches: &[LossrBranch]) -> Result<Assemblage> {
    let (da, db) = rho.bipartite_dims()?;
    let first = branches
        .first()
        .ok_or_else(|| invalid("no LOSSR branches"))?;
    let total: f64 = branches.iter().map(|b| b.weight).sum();
    if branches.iter().any(|b| !(b.weight >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "branch weights must be nonnegative and sum to 1 (got {total})"
        )));
    }
    let n_s = first.measurements.len();
    let n_x = check_settings(&first.measurements, da)?;
    let d_out = first.bob.d_out();
    let mut members = vec![CMatrix::zeros(d_out, d_out); n_s * n_x];
    for b in branches {
        if b.measurements.len() != n_s || check_settings(&b.measurements, da)? != n_x {
            return Err(dim_err("branches use different setting or outcome counts"));
        }
        if b.bob.d_in() != db || b.bob.d_out() != d_out {
            return Err(dim_err("Bob channel does not fit the state"));
        }
        let processed = KrausChannel::identity(da)
            .tensor(&b.bob)
            .apply_matrix(rho.matrix())?;
        for (s, p) in b.measurements.iter().enumerate() {
            for (x, e) in p.effects().iter().enumerate() {
                members[s * n_x + x] += contract_left(&processed, da, d_out, e).scale(b.weight);
            }
        }
    }
    Assemblage::new(n_s, n_x, members.iter().map(hermitian_part).collect())
}

/// Best payoff Bob can reach on `game` when Alice's answers and his share
/// are described by `a`: the optimum over his POVMs on `B ⊗ B0` of
/// `Σ p(s)q(t)℘(s,t,x,y) Tr[Q^y (ρ̃^{x|s} ⊗ ω^t)]`.
pub fn assemblage_value(a: &Assemblage, game: &Game) -> Result<(f64, Povm, BoundMethod)> {
    game.require_kind(GameKind::SteeringAliceUntrusted)?;
    let [ns, nt, nx, ny] = game.payoff().shape();
    if a.n_s() != ns || a.n_x() != nx {
        return Err(dim_err(
            "assemblage does not match the game's settings and outcomes",
        ));
    }
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let (db, d0) = (a.dim(), game.bob().dim());
    let rewards: Vec<CMatrix> = (0..ny)
        .map(|y| {
            let mut r = CMatrix::zeros(db * d0, db * d0);
            for t in 0..nt {
                let mut acc = CMatrix::zeros(db, db);
                for s in 0..ns {
                    for x in 0..nx {
                        let w = p[s] * q[t] * game.payoff().get(s, t, x, y);
                        if w != 0.0 {
                            acc += a.member(s, x).scale(w);
                        }
                    }
                }
                r += tensor(&acc, game.bob().state(t));
            }
            hermitian_part(&r)
        })
        .collect();
    let (povm, value, method) = optimal_povm(&rewards)?;
    Ok((value, povm, method))
}
