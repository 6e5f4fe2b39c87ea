use nalgebra::DMatrix;

use crate::bounds::lhs_bound;
use crate::error::{dim_err, invalid, Error, Result};
use crate::fixtures::steering_game;
use crate::games::{Game, PayoffTable};
use crate::qcore::linalg::{ket, projector, psd_part, spectral_decompose, tensor, CMatrix};
use crate::qcore::random::{random_density_with, random_distribution_with, rng_for};
use crate::qcore::{DensityOperator, Povm};

use super::assemblage::{assemblage_value, Assemblage};

const RESPONSE_TOL: f64 = 1e-12;

/// Hidden variable `ξ` with prior `p(ξ)`, Alice's response `p(x|s,ξ)` and
/// Bob's local state `ρ_B^ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LhsModel {
    weights: Vec<f64>,
    responses: Vec<Vec<Vec<f64>>>,
    states: Vec<DensityOperator>,
}

impl LhsModel {
    /// `responses[ξ][s][x] = p(x|s,ξ)`.
    pub fn new(
        weights: Vec<f64>,
        responses: Vec<Vec<Vec<f64>>>,
        states: Vec<DensityOperator>,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 || responses.len() != n || states.len() != n {
            return Err(dim_err(
                "weights, responses and states must have the same nonzero length",
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0))
            || (weights.iter().sum::<f64>() - 1.0).abs() > RESPONSE_TOL
        {
            return Err(invalid(
                "hidden-variable weights must be a probability vector",
            ));
        }
        let n_s = responses[0].len();
        let n_x = responses[0].first().map_or(0, Vec::len);
        if n_s == 0 || n_x == 0 {
            return Err(dim_err(
                "responses need at least one setting and one outcome",
            ));
        }
        for r in &responses {
            if r.len() != n_s || r.iter().any(|row| row.len() != n_x) {
                return Err(dim_err("response tables differ in shape"));
            }
            for row in r {
                if row.iter().any(|&p| !(p >= 0.0))
                    || (row.iter().sum::<f64>() - 1.0).abs() > RESPONSE_TOL
                {
                    return Err(invalid(
                        "each response p(·|s,ξ) must be a probability vector",
                    ));
                }
            }
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(dim_err("local states differ in dimension"));
        }
        Ok(Self {
            weights,
            responses,
            states,
        })
    }

    /// Seeded random model with full-rank local states.
    pub fn random(seed: u64, n_hidden: usize, n_s: usize, n_x: usize, d: usize) -> Result<Self> {
        if n_hidden == 0 || n_s == 0 || n_x == 0 || d == 0 {
            return Err(invalid("random model sizes must be positive"));
        }
        let mut rng = rng_for(seed, 0);
        let weights = random_distribution_with(&mut rng, n_hidden);
        let responses = (0..n_hidden)
            .map(|_| {
                (0..n_s)
                    .map(|_| random_distribution_with(&mut rng, n_x))
                    .collect()
            })
            .collect();
        let states = (0..n_hidden)
            .map(|_| DensityOperator::new(random_density_with(&mut rng, d, d), vec![d]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights, responses, states)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn responses(&self) -> &[Vec<Vec<f64>>] {
        &self.responses
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.len()
    }

    pub fn n_s(&self) -> usize {
        self.responses[0].len()
    }

    pub fn n_x(&self) -> usize {
        self.responses[0][0].len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// `ρ̃^{x|s} = Σ_ξ p(x|s,ξ) p(ξ) ρ_B^ξ`.
pub fn assemblage_from_lhs(model: &LhsModel) -> Result<Assemblage> {
    let (n_s, n_x, d) = (model.n_s(), model.n_x(), model.dim());
    let mut members = vec![CMatrix::zeros(d, d); n_s * n_x];
    for (xi, state) in model.states.iter().enumerate() {
        for s in 0..n_s {
            for x in 0..n_x {
                let w = model.weights[xi] * model.responses[xi][s][x];
                if w != 0.0 {
                    members[s * n_x + x] += state.matrix().scale(w);
                }
            }
        }
    }
    Assemblage::new(n_s, n_x, members)
}

/// Classical-quantum state `Σ_ξ p(ξ) |ξ⟩⟨ξ| ⊗ ρ_B^ξ` and Alice settings
/// `P^{x|s} = Σ_ξ p(x|s,ξ) |ξ⟩⟨ξ|` that reproduce the model's assemblage.
pub fn lhs_embed_cq(model: &LhsModel) -> Result<(DensityOperator, Vec<Povm>)> {
    let (n, d) = (model.n_hidden(), model.dim());
    let pi: Vec<CMatrix> = (0..n).map(|xi| projector(&ket(n, xi))).collect();
    let sigma = (0..n).fold(CMatrix::zeros(n * d, n * d), |acc, xi| {
        acc + tensor(&pi[xi], model.states[xi].matrix()).scale(model.weights[xi])
    });
    let settings = (0..model.n_s())
        .map(|s| {
            let effects = (0..model.n_x())
                .map(|x| {
                    (0..n).fold(CMatrix::zeros(n, n), |acc, xi| {
                        acc + pi[xi].scale(model.responses[xi][s][x])
                    })
                })
                .collect();
            Povm::new(effects)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((DensityOperator::new(sigma, vec![n, d])?, settings))
}

pub const DEFAULT_MEMBERSHIP_CAP: u128 = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipOptions {
    /// Largest acceptable distance between the assemblage and the model.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cap: u128,
    /// How far a steering game must be violated to count.
    pub gap_margin: f64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
            cap: DEFAULT_MEMBERSHIP_CAP,
            gap_margin: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    InLhs {
        model: LhsModel,
        residual: f64,
    },
    NotInLhs {
        game: Game,
        value: f64,
        bound: f64,
        gap: f64,
    },
    Undecided {
        residual: f64,
        iterations: usize,
    },
}

/// Relabelings of the two-setting steering fixture: both setting orders and
/// every per-setting flip of Alice's answer. Empty for other shapes.
pub fn steering_battery(n_s: usize, n_x: usize) -> Vec<Game> {
    if n_s != 2 || n_x != 2 {
        return Vec::new();
    }
    let base = steering_game();
    let mut out = Vec::new();
    for swap in [false, true] {
        for flips in 0..4usize {
            let table = PayoffTable::from_fn(base.payoff().shape(), |s, t, x, y| {
                let s0 = if swap { 1 - s } else { s };
                let x0 = x ^ ((flips >> s) & 1);
                base.payoff().get(s0, t, x0, y)
            })
            .expect("same shape");
            out.push(base.with_payoff(table).expect("same questions"));
        }
    }
    out
}

pub fn lhs_membership(a: &Assemblage, tolerance: f64) -> Result<Membership> {
    lhs_membership_with(
        a,
        &MembershipOptions {
            tolerance,
            ..MembershipOptions::default()
        },
    )
}

/// Looks for a certificate either way: a local-hidden-state model within
/// `tolerance`, or a steering game the assemblage wins by more than
/// `gap_margin` over the game's local-hidden-state bound.
pub fn lhs_membership_with(a: &Assemblage, opts: &MembershipOptions) -> Result<Membership> {
    let (n_s, n_x) = (a.n_s(), a.n_x());
    let size = (n_x as u128).checked_pow(n_s as u32).unwrap_or(u128::MAX);
    if size > opts.cap {
        return Err(Error::CapExceeded {
            size,
            cap: opts.cap,
        });
    }
    if let Some((model, residual)) = single_state_model(a)? {
        if residual <= opts.tolerance {
            return Ok(Membership::InLhs { model, residual });
        }
    }
    for game in steering_battery(n_s, n_x) {
        let (value, _, _) = assemblage_value(a, &game)?;
        let bound = lhs_bound(&game)?.value;
        if value > bound + opts.gap_margin {
            return Ok(Membership::NotInLhs {
                gap: value - bound,
                game,
                value,
                bound,
            });
        }
    }
    alternating_projection(a, size as usize, opts)
}

/// One hidden state equal to Bob's marginal with responses `Tr ρ̃^{x|s}`.
fn single_state_model(a: &Assemblage) -> Result<Option<(LhsModel, f64)>> {
    let marginal = a.marginal(0);
    let responses: Vec<Vec<f64>> = (0..a.n_s())
        .map(|s| {
            let row: Vec<f64> = (0..a.n_x())
                .map(|x| a.member(s, x).trace().re.max(0.0))
                .collect();
            let total: f64 = row.iter().sum();
            row.iter().map(|p| p / total).collect()
        })
        .collect();
    let state = match DensityOperator::new(marginal, vec![a.dim()]) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    let model = match LhsModel::new(vec![1.0], vec![responses], vec![state]) {
        Ok(m) => m,
        Err(_) => return Ok(None),
    };
    let residual = assemblage_from_lhs(&model)?.max_diff(a);
    Ok(Some((model, residual)))
}

/// Deterministic response `λ(s) = (λ / |X|^s) mod |X|`.
fn response(lambda: usize, s: usize, n_x: usize) -> usize {
    (lambda / n_x.pow(s as u32)) % n_x
}

/// Alternates between the affine set `Σ_{λ: λ(s)=x} σ̃_λ = ρ̃^{x|s}` and
/// the cone of positive `σ̃_λ`, working inside the support of Bob's
/// marginal.
fn alternating_projection(
    a: &Assemblage,
    n_lambda: usize,
    opts: &MembershipOptions,
) -> Result<Membership> {
    let (n_s, n_x) = (a.n_s(), a.n_x());
    let n_rows = n_s * n_x;
    let spec = spectral_decompose(&a.marginal(0))?;
    let rank = spec.values.iter().filter(|&&l| l > 1e-12).count().max(1);
    let v = spec.vectors.columns(0, rank).into_owned();
    let vh = v.adjoint();
    let targets: Vec<CMatrix> = a.members().iter().map(|m| &vh * m * &v).collect();

    let d_mat = DMatrix::<f64>::from_fn(n_rows, n_lambda, |k, l| {
        let (s, x) = (k / n_x, k % n_x);
        if response(l, s, n_x) == x {
            1.0
        } else {
            0.0
        }
    });
    let gram_pinv = (&d_mat * d_mat.transpose())
        .pseudo_inverse(1e-12)
        .map_err(|e| invalid(format!("pseudo-inverse failed: {e}")))?;
    let correction = d_mat.transpose() * gram_pinv;

    let apply = |sigma: &[CMatrix]| -> Vec<CMatrix> {
        (0..n_rows)
            .map(|k| {
                (0..n_lambda)
                    .filter(|&l| d_mat[(k, l)] != 0.0)
                    .fold(CMatrix::zeros(rank, rank), |acc, l| acc + &sigma[l])
            })
            .collect()
    };
    let mut sigma = vec![CMatrix::zeros(rank, rank); n_lambda];
    let mut residual = f64::INFINITY;
    for iter in 0..opts.max_iterations {
        let diff: Vec<CMatrix> = apply(&sigma)
            .iter()
            .zip(&targets)
            .map(|(m, t)| m - t)
            .collect();
        for (l, s) in sigma.iter_mut().enumerate() {
            for (k, dk) in diff.iter().enumerate() {
                let c = correction[(l, k)];
                if c != 0.0 {
                    *s -= dk.scale(c);
                }
            }
        }
        for s in sigma.iter_mut() {
            *s = psd_part(s)?;
        }
        residual = apply(&sigma)
            .iter()
            .zip(&targets)
            .map(|(m, t)| crate::qcore::linalg::max_abs_diff(m, t))
            .fold(0.0, f64::max);
        if residual <= opts.tolerance / 2.0 {
            if let Some((model, r)) = model_from(&sigma, &v, n_s, n_x, a)? {
                if r <= opts.tolerance {
                    return Ok(Membership::InLhs { model, residual: r });
                }
            }
        }
        if iter + 1 == opts.max_iterations {
            break;
        }
    }
    Ok(Membership::Undecided {
        residual,
        iterations: opts.max_iterations,
    })
}

fn model_from(
    sigma: &[CMatrix],
    v: &CMatrix,
    n_s: usize,
    n_x: usize,
    a: &Assemblage,
) -> Result<Option<(LhsModel, f64)>> {
    let vh = v.adjoint();
    let lifted: Vec<(usize, CMatrix, f64)> = sigma
        .iter()
        .enumerate()
        .map(|(l, s)| (l, v * s * &vh, s.trace().re))
        .filter(|(_, _, tr)| *tr > 1e-14)
        .collect();
    let total: f64 = lifted.iter().map(|(_, _, tr)| tr).sum();
    let mut weights = Vec::new();
    let mut responses = Vec::new();
    let mut states = Vec::new();
    for (l, m, tr) in lifted {
        let state = match DensityOperator::new(
            crate::qcore::linalg::hermitian_part(&m.unscale(tr)),
            vec![a.dim()],
        ) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        weights.push(tr / total);
        responses.push(
            (0..n_s)
                .map(|s| {
                    (0..n_x)
                        .map(|x| if response(l, s, n_x) == x { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        );
        states.push(state);
    }
    let model = match LhsModel::new(weights, responses, states) {
        Ok(m) => m,
        Err(_) => return Ok(None),
    };
    let residual = assemblage_from_lhs(&model)?.max_diff(a);
    Ok(Some((model, residual)))
}
