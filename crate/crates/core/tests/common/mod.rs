//! Reference implementations written with plain index loops, kept apart
//! from the library's contraction routines.
#![allow(dead_code)]

use qgames::engine::Strategy;
use qgames::games::{make_game, Game, PayoffTable, QuestionEnsemble};
use qgames::qcore::random::{random_distribution_with, rng_for, uniform};
use qgames::qcore::{random_density, random_povm, CMatrix, DensityOperator, C64};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn kron_all(ms: &[&CMatrix]) -> CMatrix {
    ms[1..].iter().fold(ms[0].clone(), |acc, m| kron(&acc, m))
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Partial trace by summing over multi-indices of the traced factors.
pub fn brute_partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let n = dims.len();
    let digits = |mut k: usize| {
        let mut d = vec![0; n];
        for i in (0..n).rev() {
            d[i] = k % dims[i];
            k /= dims[i];
        }
        d
    };
    let total: usize = dims.iter().product();
    let kept: usize = keep.iter().map(|&i| dims[i]).product();
    let sub_index = |d: &[usize]| keep.iter().fold(0, |acc, &i| acc * dims[i] + d[i]);
    let mut out = CMatrix::zeros(kept, kept);
    for r in 0..total {
        let dr = digits(r);
        for c in 0..total {
            let dc = digits(c);
            if (0..n).any(|i| !keep.contains(&i) && dr[i] != dc[i]) {
                continue;
            }
            out[(sub_index(&dr), sub_index(&dc))] += m[(r, c)];
        }
    }
    out
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `μ(x,y|s,t) = Tr[(P^x ⊗ Q^y)(τ^s ⊗ ρ ⊗ ω^t)]` on the full space.
pub fn brute_mu(game: &Game, rho: &DensityOperator, strat: &Strategy) -> Vec<f64> {
    let [ns, nt, nx, ny] = game.payoff().shape();
    let mut out = Vec::new();
    for s in 0..ns {
        for t in 0..nt {
            let full = kron_all(&[game.alice().state(s), rho.matrix(), game.bob().state(t)]);
            for x in 0..nx {
                for y in 0..ny {
                    let op = kron(strat.alice.effect(x), strat.bob.effect(y));
                    out.push(trace(&(op * &full)).re);
                }
            }
        }
    }
    out
}

pub fn brute_payoff(game: &Game, rho: &DensityOperator, strat: &Strategy) -> f64 {
    let [ns, nt, nx, ny] = game.payoff().shape();
    let mu = brute_mu(game, rho, strat);
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let mut v = 0.0;
    for s in 0..ns {
        for t in 0..nt {
            for x in 0..nx {
                for y in 0..ny {
                    v += p[s]
                        * q[t]
                        * game.payoff().get(s, t, x, y)
                        * mu[((s * nt + t) * nx + x) * ny + y];
                }
            }
        }
    }
    v
}

/// Every function `{0..n} → {0..m}` as a vector of values.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let v = k % m;
                    k /= m;
                    v
                })
                .collect()
        })
        .collect()
}

/// Best deterministic payoff `max_{f,g} Σ p q ℘(s,t,f(s),g(t))`.
pub fn brute_lhv(game: &Game) -> f64 {
    let [ns, nt, nx, ny] = game.payoff().shape();
    let (p, q) = (game.alice().probs(), game.bob().probs());
    let mut best = f64::NEG_INFINITY;
    for f in all_functions(ns, nx) {
        for g in all_functions(nt, ny) {
            let mut v = 0.0;
            for s in 0..ns {
                for t in 0..nt {
                    v += p[s] * q[t] * game.payoff().get(s, t, f[s], g[t]);
                }
            }
            best = best.max(v);
        }
    }
    best
}

pub fn random_table(seed: u64, shape: [usize; 4], scale: f64) -> PayoffTable {
    let mut rng = rng_for(seed, 7);
    let n: usize = shape.iter().product();
    PayoffTable::new(
        shape,
        (0..n)
            .map(|_| scale * (2.0 * uniform(&mut rng) - 1.0))
            .collect(),
    )
    .unwrap()
}

/// Random mixed question states of dimension `d` with a random prior.
pub fn random_ensemble(seed: u64, n: usize, d: usize) -> QuestionEnsemble {
    let states = (0..n)
        .map(|i| random_density(seed.wrapping_mul(31).wrapping_add(i as u64), d, d).unwrap())
        .collect();
    let mut rng = rng_for(seed, 3);
    QuestionEnsemble::new(states, random_distribution_with(&mut rng, n)).unwrap()
}

pub fn random_semiquantum(seed: u64, shape: [usize; 4], d0: usize) -> Game {
    let [ns, nt, _, _] = shape;
    make_game(
        random_ensemble(seed, ns, d0),
        random_ensemble(seed + 1000, nt, d0),
        random_table(seed, shape, 3.0),
    )
    .unwrap()
}

pub fn random_bipartite(seed: u64, da: usize, db: usize, rank: usize) -> DensityOperator {
    random_density(seed, da * db, rank)
        .unwrap()
        .with_dims(vec![da, db])
        .unwrap()
}

pub fn random_strategy(seed: u64, game: &Game, da: usize, db: usize) -> Strategy {
    Strategy::new(
        random_povm(seed, game.alice().dim() * da, game.n_x()).unwrap(),
        random_povm(seed + 1, db * game.bob().dim(), game.n_y()).unwrap(),
    )
}
