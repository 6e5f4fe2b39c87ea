//! JSON formats for games, states, measurements, strategies, assemblages
//! and bound certificates.
//!
//! Complex matrices are row-major nested arrays of `[re, im]` pairs.
//! Floats are written in shortest round-trip form, so parse → serialize is
//! byte-stable.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundMethod, BoundResult, Certificate};
use crate::engine::Strategy;
use crate::games::{Diagnostic, Game, RawGame};
use crate::maps::Assemblage;
use crate::qcore::linalg::{c, CMatrix};
use crate::qcore::{DensityOperator, Povm};
use crate::states;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;
pub type ParseResult<T> = std::result::Result<T, Vec<Diagnostic>>;

fn diag(location: impl Into<String>, message: impl ToString) -> Vec<Diagnostic> {
    vec![Diagnostic {
        location: location.into(),
        message: message.to_string(),
    }]
}

/// Deserializes with the failing field path and line/column in the
/// diagnostic.
pub fn from_json<T: DeserializeOwned>(text: &str) -> ParseResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = format!("line {} column {}", inner.line(), inner.column());
        let location = match (path.is_empty() || path == ".", inner.line() == 0) {
            (true, false) => at,
            (false, false) => format!("{path} ({at})"),
            (true, true) => "document".to_string(),
            (false, true) => path,
        };
        diag(location, inner)
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization of plain data");
    s.push('\n');
    s
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(j: &MatrixJson, location: &str) -> ParseResult<CMatrix> {
    let rows = j.len();
    let cols = j.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(diag(location, "matrix is empty"));
    }
    if let Some(i) = j.iter().position(|r| r.len() != cols) {
        return Err(diag(
            format!("{location}[{i}]"),
            format!("row has {} entries, expected {cols}", j[i].len()),
        ));
    }
    Ok(CMatrix::from_fn(rows, cols, |r, k| {
        c(j[r][k][0], j[r][k][1])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub matrix: MatrixJson,
    pub dims: Vec<usize>,
}

impl OperatorJson {
    pub fn from_state(rho: &DensityOperator) -> Self {
        Self {
            matrix: matrix_to_json(rho.matrix()),
            dims: rho.dims().to_vec(),
        }
    }

    pub fn to_state(&self, location: &str) -> ParseResult<DensityOperator> {
        let m = matrix_from_json(&self.matrix, &format!("{location}.matrix"))?;
        DensityOperator::new(m, self.dims.clone()).map_err(|e| diag(location, e))
    }
}

/// Named state families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyJson {
    Werner { w: f64 },
    Bell { index: usize },
    Singlet,
    MaxEntangled { d: usize },
    MaximallyMixed { dims: Vec<usize> },
}

impl FamilyJson {
    pub fn build(&self) -> crate::Result<DensityOperator> {
        match self {
            FamilyJson::Werner { w } => states::werner_state(*w),
            FamilyJson::Bell { index } => states::bell_state(*index),
            FamilyJson::Singlet => Ok(states::singlet()),
            FamilyJson::MaxEntangled { d } => states::maximally_entangled(*d),
            FamilyJson::MaximallyMixed { dims } => {
                if dims.is_empty() || dims.contains(&0) {
                    return Err(crate::Error::Dimension(format!("invalid dims {dims:?}")));
                }
                Ok(DensityOperator::maximally_mixed(dims.clone()))
            }
        }
    }
}

/// Either an explicit operator or a named family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StateJson {
    Explicit(OperatorJson),
    Family(FamilyJson),
}

impl StateJson {
    /// Dispatches on a `family` key, then parses the text again as the
    /// concrete variant so diagnostics keep their positions.
    pub fn parse(text: &str) -> ParseResult<Self> {
        let v: serde_json::Value = from_json(text)?;
        if v.get("family").is_some() {
            from_json(text).map(StateJson::Family)
        } else {
            from_json(text).map(StateJson::Explicit)
        }
    }

    pub fn build(&self) -> ParseResult<DensityOperator> {
        match self {
            StateJson::Explicit(op) => op.to_state("state"),
            StateJson::Family(f) => f.build().map_err(|e| diag("state", e)),
        }
    }
}

pub fn parse_state(text: &str) -> ParseResult<DensityOperator> {
    StateJson::parse(text)?.build()
}

pub fn state_to_json(rho: &DensityOperator) -> String {
    to_json(&StateJson::Explicit(OperatorJson::from_state(rho)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub states: Vec<OperatorJson>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJson {
    pub alice: EnsembleJson,
    pub bob: EnsembleJson,
    /// `[s][t][x][y]`.
    pub payoff: Vec<Vec<Vec<Vec<Option<f64>>>>>,
}

impl GameJson {
    pub fn from_game(g: &Game) -> Self {
        let ens = |e: &crate::games::QuestionEnsemble| EnsembleJson {
            states: e.states().iter().map(OperatorJson::from_state).collect(),
            probs: e.probs().to_vec(),
        };
        Self {
            alice: ens(g.alice()),
            bob: ens(g.bob()),
            payoff: RawGame::from(g).payoff,
        }
    }

    pub fn to_raw(&self) -> ParseResult<RawGame> {
        let mut diags = Vec::new();
        let mut mats = |name: &str, e: &EnsembleJson| -> Vec<CMatrix> {
            let mut out = Vec::new();
            for (i, op) in e.states.iter().enumerate() {
                let loc = format!("{name}.states[{i}]");
                match matrix_from_json(&op.matrix, &format!("{loc}.matrix")) {
                    Ok(m) => {
                        if op.dims.iter().product::<usize>() != m.nrows() {
                            diags.extend(diag(
                                &loc,
                                format!(
                                    "dims {:?} do not match a {}x{} matrix",
                                    op.dims,
                                    m.nrows(),
                                    m.ncols()
                                ),
                            ));
                        }
                        out.push(m)
                    }
                    Err(d) => diags.extend(d),
                }
            }
            out
        };
        let alice_states = mats("alice", &self.alice);
        let bob_states = mats("bob", &self.bob);
        if !diags.is_empty() {
            return Err(diags);
        }
        Ok(RawGame {
            alice_states,
            alice_probs: self.alice.probs.clone(),
            bob_states,
            bob_probs: self.bob.probs.clone(),
            payoff: self.payoff.clone(),
        })
    }
}

pub fn parse_game(text: &str) -> ParseResult<Game> {
    from_json::<GameJson>(text)?.to_raw()?.build()
}

pub fn game_to_json(g: &Game) -> String {
    to_json(&GameJson::from_game(g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub effects: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            effects: p.effects().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_povm(&self, location: &str) -> ParseResult<Povm> {
        let effects = self
            .effects
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_from_json(m, &format!("{location}.effects[{i}]")))
            .collect::<ParseResult<Vec<_>>>()?;
        Povm::new(effects).map_err(|e| diag(location, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyJson {
    pub alice: PovmJson,
    pub bob: PovmJson,
}

impl StrategyJson {
    pub fn from_strategy(s: &Strategy) -> Self {
        Self {
            alice: PovmJson::from_povm(&s.alice),
            bob: PovmJson::from_povm(&s.bob),
        }
    }

    pub fn to_strategy(&self) -> ParseResult<Strategy> {
        Ok(Strategy::new(
            self.alice.to_povm("alice")?,
            self.bob.to_povm("bob")?,
        ))
    }
}

pub fn parse_strategy(text: &str) -> ParseResult<Strategy> {
    from_json::<StrategyJson>(text)?.to_strategy()
}

pub fn strategy_to_json(s: &Strategy) -> String {
    to_json(&StrategyJson::from_strategy(s))
}

/// Per-setting measurements as a top-level array.
pub fn parse_povms(text: &str) -> ParseResult<Vec<Povm>> {
    let list: Vec<PovmJson> = from_json(text)?;
    if list.is_empty() {
        return Err(diag("povms", "no measurement settings"));
    }
    list.iter()
        .enumerate()
        .map(|(i, p)| p.to_povm(&format!("[{i}]")))
        .collect()
}

pub fn povms_to_json(ps: &[Povm]) -> String {
    to_json(&ps.iter().map(PovmJson::from_povm).collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblageJson {
    #[serde(rename = "S")]
    pub n_s: usize,
    #[serde(rename = "X")]
    pub n_x: usize,
    /// Keyed `"s,x"`.
    pub members: BTreeMap<String, MatrixJson>,
}

impl AssemblageJson {
    pub fn from_assemblage(a: &Assemblage) -> Self {
        let mut members = BTreeMap::new();
        for s in 0..a.n_s() {
            for x in 0..a.n_x() {
                members.insert(format!("{s},{x}"), matrix_to_json(a.member(s, x)));
            }
        }
        Self {
            n_s: a.n_s(),
            n_x: a.n_x(),
            members,
        }
    }

    pub fn to_assemblage(&self) -> ParseResult<Assemblage> {
        let mut map = BTreeMap::new();
        for (key, m) in &self.members {
            let loc = format!("members.{key}");
            let parsed: Option<(usize, usize)> = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let (s, x) = parsed.ok_or_else(|| diag(&loc, "key must be \"s,x\""))?;
            if s >= self.n_s || x >= self.n_x {
                return Err(diag(
                    &loc,
                    format!("outside S = {} and X = {}", self.n_s, self.n_x),
                ));
            }
            map.insert((s, x), matrix_from_json(m, &loc)?);
        }
        Assemblage::from_map(self.n_s, self.n_x, &map).map_err(|e| diag("assemblage", e))
    }
}

pub fn parse_assemblage(text: &str) -> ParseResult<Assemblage> {
    from_json::<AssemblageJson>(text)?.to_assemblage()
}

pub fn assemblage_to_json(a: &Assemblage) -> String {
    to_json(&AssemblageJson::from_assemblage(a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CertificateJson {
    Deterministic {
        alice: Vec<usize>,
        bob: Vec<usize>,
    },
    LocalHiddenState {
        alice: Vec<usize>,
        bob: PovmJson,
    },
    ProductState {
        state: OperatorJson,
        strategy: StrategyJson,
    },
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        match c {
            Certificate::Deterministic { alice, bob } => CertificateJson::Deterministic {
                alice: alice.clone(),
                bob: bob.clone(),
            },
            Certificate::LocalHiddenState { alice, bob } => CertificateJson::LocalHiddenState {
                alice: alice.clone(),
                bob: PovmJson::from_povm(bob),
            },
            Certificate::ProductState { state, strategy } => CertificateJson::ProductState {
                state: OperatorJson::from_state(state),
                strategy: StrategyJson::from_strategy(strategy),
            },
        }
    }

    pub fn to_certificate(&self) -> ParseResult<Certificate> {
        Ok(match self {
            CertificateJson::Deterministic { alice, bob } => Certificate::Deterministic {
                alice: alice.clone(),
                bob: bob.clone(),
            },
            CertificateJson::LocalHiddenState { alice, bob } => Certificate::LocalHiddenState {
                alice: alice.clone(),
                bob: bob.to_povm("certificate.bob")?,
            },
            CertificateJson::ProductState { state, strategy } => Certificate::ProductState {
                state: state.to_state("certificate.state")?,
                strategy: strategy.to_strategy()?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundJson {
    pub value: f64,
    pub method: BoundMethod,
    pub certificate: CertificateJson,
}

impl BoundJson {
    pub fn from_bound(b: &BoundResult) -> Self {
        Self {
            value: b.value,
            method: b.method,
            certificate: CertificateJson::from_certificate(&b.certificate),
        }
    }

    pub fn to_bound(&self) -> ParseResult<BoundResult> {
        Ok(BoundResult {
            value: self.value,
            method: self.method,
            certificate: self.certificate.to_certificate()?,
        })
    }
}
