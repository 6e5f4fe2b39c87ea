//! Question ensembles, payoff tables and the unified game type.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Error, Result};
use crate::qcore::linalg::{ket, projector, spectral_decompose, trace_product, CMatrix};
use crate::qcore::DensityOperator;

/// Pairwise overlap `Tr(τ τ')` below which two question states count as
/// orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Question states sent to one party, with their prior.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionEnsemble {
    states: Vec<DensityOperator>,
    probs: Vec<f64>,
    classical: bool,
}

impl QuestionEnsemble {
    pub fn new(states: Vec<DensityOperator>, probs: Vec<f64>) -> Result<Self> {
        let issues = ensemble_issues(&states, &probs);
        if let Some(first) = issues.into_iter().next() {
            return Err(invalid(first));
        }
        let classical = pairwise_orthogonal(&states);
        Ok(Self {
            states,
            probs,
            classical,
        })
    }

    /// Uniform prior over `states`.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    /// Computational basis states `|0⟩, …, |n−1⟩` of dimension `n`.
    pub fn computational(probs: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        let states = (0..n)
            .map(|i| DensityOperator::new(projector(&ket(n, i)), vec![n]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states, probs)
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &CMatrix {
        self.states[i].matrix()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    /// Projector onto the support of question state `i`.
    pub fn support_projector(&self, i: usize) -> CMatrix {
        let spec = spectral_decompose(self.state(i)).expect("validated state is Hermitian");
        spec.rebuild(|l| if l > ORTHOGONALITY_TOL { 1.0 } else { 0.0 })
    }
}

fn pairwise_orthogonal(states: &[DensityOperator]) -> bool {
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            if trace_product(a.matrix(), b.matrix()).re.abs() > ORTHOGONALITY_TOL {
                return false;
            }
        }
    }
    true
}

fn probability_issues(probs: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        if !(p > 0.0) || !p.is_finite() {
            out.push(format!("probability {i} is {p}, must be strictly positive"));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        out.push(format!("probabilities sum to {total}, expected 1"));
    }
    out
}

fn ensemble_issues(states: &[DensityOperator], probs: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    if states.is_empty() {
        out.push("ensemble has no states".to_string());
    }
    if states.len() != probs.len() {
        out.push(format!(
            "ensemble has {} states but {} probabilities",
            states.len(),
            probs.len()
        ));
    }
    out.extend(probability_issues(probs));
    if let Some(first) = states.first() {
        for (i, s) in states.iter().enumerate() {
            if s.dim() != first.dim() {
                out.push(format!(
                    "state {i} has dimension {}, expected {}",
                    s.dim(),
                    first.dim()
                ));
            }
        }
    }
    out
}

/// Payoff `℘(s, t, x, y)` stored densely in `[s][t][x][y]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    shape: [usize; 4],
    values: Vec<f64>,
}

impl PayoffTable {
    pub fn new(shape: [usize; 4], values: Vec<f64>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(invalid(format!("payoff shape {shape:?} has an empty axis")));
        }
        let n: usize = shape.iter().product();
        if values.len() != n {
            return Err(dim_err(format!(
                "payoff shape {shape:?} needs {n} entries, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let [s, t, x, y] = unflatten(shape, i);
            return Err(invalid(format!(
                "payoff entry (s={s},t={t},x={x},y={y}) is not finite"
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn from_fn(
        shape: [usize; 4],
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.iter().product());
        for s in 0..shape[0] {
            for t in 0..shape[1] {
                for x in 0..shape[2] {
                    for y in 0..shape[3] {
                        values.push(f(s, t, x, y));
                    }
                }
            }
        }
        Self::new(shape, values)
    }

    pub fn zeros(shape: [usize; 4]) -> Result<Self> {
        Self::from_fn(shape, |_, _, _, _| 0.0)
    }

    /// `[|S|, |T|, |X|, |Y|]`.
    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    pub fn get(&self, s: usize, t: usize, x: usize, y: usize) -> f64 {
        let [_, nt, nx, ny] = self.shape;
        self.values[((s * nt + t) * nx + x) * ny + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            shape: self.shape,
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    pub fn added(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(dim_err("payoff tables differ in shape"));
        }
        Ok(Self {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

fn unflatten(shape: [usize; 4], mut i: usize) -> [usize; 4] {
    let mut out = [0; 4];
    for k in (0..4).rev() {
        out[k] = i % shape[k];
        i /= shape[k];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameKind {
    Bell,
    SteeringAliceUntrusted,
    Semiquantum,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GameKind::Bell => "Bell",
            GameKind::SteeringAliceUntrusted => "SteeringAliceUntrusted",
            GameKind::Semiquantum => "Semiquantum",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    alice: QuestionEnsemble,
    bob: QuestionEnsemble,
    payoff: PayoffTable,
    kind: GameKind,
}

pub fn classify(alice: &QuestionEnsemble, bob: &QuestionEnsemble) -> GameKind {
    match (alice.is_classical(), bob.is_classical()) {
        (true, true) => GameKind::Bell,
        (true, false) => GameKind::SteeringAliceUntrusted,
        _ => GameKind::Semiquantum,
    }
}

pub fn make_game(
    alice: QuestionEnsemble,
    bob: QuestionEnsemble,
    payoff: PayoffTable,
) -> Result<Game> {
    let [ns, nt, _, _] = payoff.shape();
    if alice.len() != ns || bob.len() != nt {
        return Err(dim_err(format!(
            "ensembles have {}x{} questions but the payoff table is {:?}",
            alice.len(),
            bob.len(),
            payoff.shape()
        )));
    }
    let kind = classify(&alice, &bob);
    Ok(Game {
        alice,
        bob,
        payoff,
        kind,
    })
}

impl Game {
    pub fn alice(&self) -> &QuestionEnsemble {
        &self.alice
    }

    pub fn bob(&self) -> &QuestionEnsemble {
        &self.bob
    }

    pub fn payoff(&self) -> &PayoffTable {
        &self.payoff
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn n_s(&self) -> usize {
        self.payoff.shape[0]
    }

    pub fn n_t(&self) -> usize {
        self.payoff.shape[1]
    }

    pub fn n_x(&self) -> usize {
        self.payoff.shape[2]
    }

    pub fn n_y(&self) -> usize {
        self.payoff.shape[3]
    }

    /// Same questions, different payoff table.
    pub fn with_payoff(&self, payoff: PayoffTable) -> Result<Self> {
        make_game(self.alice.clone(), self.bob.clone(), payoff)
    }

    pub fn require_kind(&self, expected: GameKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::GameKind {
                expected: expected.to_string(),
                found: self.kind.to_string(),
            });
        }
        Ok(())
    }
}

/// Turns Bell-inequality coefficients into a Bell game with payoff
/// `w/(p(s) q(t))`, so that the average payoff equals `Σ w · p(x,y|s,t)`.
pub fn bell_game_from_inequality(w: &PayoffTable, p: &[f64], q: &[f64]) -> Result<Game> {
    let [ns, nt, _, _] = w.shape();
    if p.len() != ns || q.len() != nt {
        return Err(dim_err(
            "question distributions do not match the coefficient table",
        ));
    }
    if p.iter().chain(q).any(|&v| !(v > 0.0)) {
        return Err(invalid("question probabilities must be strictly positive"));
    }
    let payoff = PayoffTable::from_fn(w.shape(), |s, t, x, y| w.get(s, t, x, y) / (p[s] * q[t]))?;
    make_game(
        QuestionEnsemble::computational(p.to_vec())?,
        QuestionEnsemble::computational(q.to_vec())?,
        payoff,
    )
}

/// `w(x,y,s,t) = (−1)^{x⊕y⊕st}`.
pub fn chsh_coefficients() -> PayoffTable {
    PayoffTable::from_fn([2, 2, 2, 2], |s, t, x, y| {
        if (x ^ y ^ (s & t)) == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .expect("fixed shape")
}

pub fn chsh_game() -> Game {
    bell_game_from_inequality(&chsh_coefficients(), &[0.5, 0.5], &[0.5, 0.5])
        .expect("CHSH construction is valid")
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Unvalidated game description, as read from a file.
#[derive(Debug, Clone, Default)]
pub struct RawGame {
    pub alice_states: Vec<CMatrix>,
    pub alice_probs: Vec<f64>,
    pub bob_states: Vec<CMatrix>,
    pub bob_probs: Vec<f64>,
    /// Nested `[s][t][x][y]` entries; `None` marks a missing entry.
    pub payoff: Vec<Vec<Vec<Vec<Option<f64>>>>>,
}

/// Lists every violated game invariant; empty iff the description is a
/// valid game.
pub fn validate_raw(raw: &RawGame) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |location: String, message: String| out.push(Diagnostic { location, message });

    for (name, states, probs) in [
        ("alice", &raw.alice_states, &raw.alice_probs),
        ("bob", &raw.bob_states, &raw.bob_probs),
    ] {
        let mut valid = Vec::new();
        for (i, m) in states.iter().enumerate() {
            match DensityOperator::new(m.clone(), vec![m.nrows().max(1)]) {
                Ok(rho) => valid.push(rho),
                Err(e) => push(format!("{name}.states[{i}]"), e.to_string()),
            }
        }
        let issues = if valid.len() == states.len() {
            ensemble_issues(&valid, probs)
        } else {
            probability_issues(probs)
        };
        for msg in issues {
            push(format!("{name} ensemble"), msg);
        }
    }

    let ns = raw.payoff.len();
    let nt = raw.payoff.iter().map(Vec::len).max().unwrap_or(0);
    let nx = raw.payoff.iter().flatten().map(Vec::len).max().unwrap_or(0);
    let ny = raw
        .payoff
        .iter()
        .flatten()
        .flatten()
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    if ns * nt * nx * ny == 0 {
        push("payoff".into(), "payoff table is empty".into());
    }
    for s in 0..ns {
        for t in 0..nt {
            for x in 0..nx {
                for y in 0..ny {
                    let entry = raw
                        .payoff
                        .get(s)
                        .and_then(|a| a.get(t))
                        .and_then(|b| b.get(x))
                        .and_then(|c| c.get(y))
                        .copied()
                        .flatten();
                    match entry {
                        None => push(
                            format!("payoff[{s}][{t}][{x}][{y}]"),
                            "missing entry".into(),
                        ),
                        Some(v) if !v.is_finite() => push(
                            format!("payoff[{s}][{t}][{x}][{y}]"),
                            format!("entry {v} is not finite"),
                        ),
                        _ => {}
                    }
                }
            }
        }
    }
    if raw.alice_states.len() != ns {
        push(
            "alice ensemble".into(),
            format!(
                "{} states but payoff has |S| = {ns}",
                raw.alice_states.len()
            ),
        );
    }
    if raw.bob_states.len() != nt {
        push(
            "bob ensemble".into(),
            format!("{} states but payoff has |T| = {nt}", raw.bob_states.len()),
        );
    }
    out
}

/// Diagnostics for an already constructed game; empty for any game built
/// through [`make_game`].
pub fn validate_game(g: &Game) -> Vec<Diagnostic> {
    validate_raw(&RawGame::from(g))
}

impl From<&Game> for RawGame {
    fn from(g: &Game) -> Self {
        let [ns, nt, nx, ny] = g.payoff.shape();
        let states = |e: &QuestionEnsemble| {
            e.states()
                .iter()
                .map(|r| r.matrix().clone())
                .collect::<Vec<_>>()
        };
        RawGame {
            alice_states: states(&g.alice),
            alice_probs: g.alice.probs().to_vec(),
            bob_states: states(&g.bob),
            bob_probs: g.bob.probs().to_vec(),
            payoff: (0..ns)
                .map(|s| {
                    (0..nt)
                        .map(|t| {
                            (0..nx)
                                .map(|x| (0..ny).map(|y| Some(g.payoff.get(s, t, x, y))).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl RawGame {
    /// Builds the game, or returns the full diagnostic list.
    pub fn build(&self) -> std::result::Result<Game, Vec<Diagnostic>> {
        let diags = validate_raw(self);
        if !diags.is_empty() {
            return Err(diags);
        }
        let ensemble = |states: &[CMatrix], probs: &[f64]| {
            let rhos = states
                .iter()
                .map(|m| DensityOperator::new(m.clone(), vec![m.nrows()]))
                .collect::<Result<Vec<_>>>()?;
            QuestionEnsemble::new(rhos, probs.to_vec())
        };
        let to_diag = |e: Error| {
            vec![Diagnostic {
                location: "game".into(),
                message: e.to_string(),
            }]
        };
        let alice = ensemble(&self.alice_states, &self.alice_probs).map_err(to_diag)?;
        let bob = ensemble(&self.bob_states, &self.bob_probs).map_err(to_diag)?;
        let shape = [
            self.payoff.len(),
            self.payoff[0].len(),
            self.payoff[0][0].len(),
            self.payoff[0][0][0].len(),
        ];
        let payoff = PayoffTable::from_fn(shape, |s, t, x, y| {
            self.payoff[s][t][x][y].expect("validated")
        })
        .map_err(to_diag)?;
        make_game(alice, bob, payoff).map_err(to_diag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::qubit;

    fn pure(v: &crate::qcore::CVector) -> DensityOperator {
        DensityOperator::from_pure(v, vec![v.len()]).unwrap()
    }

    pub(crate) fn bb84() -> QuestionEnsemble {
        QuestionEnsemble::uniform(vec![
            pure(&qubit::zero()),
            pure(&qubit::one()),
            pure(&qubit::plus()),
            pure(&qubit::minus()),
        ])
        .unwrap()
    }

    #[test]
    fn kind_from_orthogonality() {
        let basis4 = QuestionEnsemble::computational(vec![0.25; 4]).unwrap();
        let table = PayoffTable::zeros([4, 4, 2, 2]).unwrap();
        let g = make_game(basis4.clone(), basis4.clone(), table.clone()).unwrap();
        assert_eq!(g.kind(), GameKind::Bell);
        let g = make_game(basis4.clone(), bb84(), table.clone()).unwrap();
        assert_eq!(g.kind(), GameKind::SteeringAliceUntrusted);
        let g = make_game(bb84(), bb84(), table.clone()).unwrap();
        assert_eq!(g.kind(), GameKind::Semiquantum);
        let g = make_game(bb84(), basis4, table).unwrap();
        assert_eq!(g.kind(), GameKind::Semiquantum);
    }

    #[test]
    fn cardinality_mismatch_rejected() {
        let e = QuestionEnsemble::computational(vec![0.5, 0.5]).unwrap();
        assert!(make_game(e.clone(), e, PayoffTable::zeros([3, 2, 2, 2]).unwrap()).is_err());
    }

    #[test]
    fn chsh_payoffs_are_plus_minus_four() {
        let g = chsh_game();
        assert_eq!(g.kind(), GameKind::Bell);
        assert_eq!(g.payoff().shape(), [2, 2, 2, 2]);
        for s in 0..2 {
            for t in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        let sign = if x ^ y ^ (s & t) == 0 { 4.0 } else { -4.0 };
                        assert_eq!(g.payoff().get(s, t, x, y), sign);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_coefficients_scale_by_four() {
        let w = PayoffTable::from_fn([2, 2, 2, 2], |_, _, _, _| 0.7).unwrap();
        let g = bell_game_from_inequality(&w, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!(g.payoff().values().iter().all(|&v| (v - 2.8).abs() < 1e-15));
    }

    #[test]
    fn zero_probability_rejected() {
        assert!(bell_game_from_inequality(&chsh_coefficients(), &[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn validation_reports() {
        assert!(validate_game(&chsh_game()).is_empty());

        let mut raw = RawGame::from(&chsh_game());
        raw.payoff[1][0][1].pop();
        let d = validate_raw(&raw);
        assert!(
            d.iter().any(|d| d.location == "payoff[1][0][1][1]"),
            "{d:?}"
        );

        let mut raw = RawGame::from(&chsh_game());
        raw.bob_probs = vec![0.45, 0.45];
        let d = validate_raw(&raw);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].location, "bob ensemble");
        assert!(raw.build().is_err());
        assert!(RawGame::from(&chsh_game()).build().is_ok());
    }
}
