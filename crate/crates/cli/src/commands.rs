use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use qgames::appendixlab::{generalized_bell_povm, reconstruct_assemblage, teleport_identity};
use qgames::bounds::{
    lhs_bound_capped, lhv_bound_capped, seesaw_with, separable_bound_with, witness_check_with,
    BoundMethod, BoundResult, Verdict, DEFAULT_CAP, DEFAULT_MARGIN,
};
use qgames::engine::{mu, payoff_of};
use qgames::games::{validate_raw, Diagnostic, Game};
use qgames::io::{
    assemblage_to_json, from_json, parse_assemblage, parse_game, parse_povms, parse_state,
    parse_strategy, to_json, AssemblageJson, BoundJson, GameJson, OperatorJson, StateJson,
    StrategyJson,
};
use qgames::maps::{lhs_membership_with, steer_assemblage, Membership, MembershipOptions};
use qgames::qcore::linalg::{identity, max_abs_diff, trace_product};
use qgames::qcore::random::{random_density_with, rng_for};
use qgames::qcore::DensityOperator;
use qgames::states::werner_state;

use crate::config::{BoundKind, Format, RunConfig, SweepSpec};
use crate::{AppendixCmd, AssemblageCmd, CliError, Command, GameCmd, Report};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(vec![Diagnostic {
            location: path.display().to_string(),
            message: format!("cannot read file: {e}"),
        }])
    })
}

/// Prefixes diagnostics with the file they came from.
fn in_file(path: &Path) -> impl Fn(Vec<Diagnostic>) -> CliError + '_ {
    move |d| {
        CliError::Validation(
            d.into_iter()
                .map(|x| Diagnostic {
                    location: format!("{}: {}", path.display(), x.location),
                    message: x.message,
                })
                .collect(),
        )
    }
}

fn load_game(path: &Path) -> Result<Game, CliError> {
    parse_game(&read(path)?).map_err(in_file(path))
}

fn load_state(path: &Path) -> Result<DensityOperator, CliError> {
    parse_state(&read(path)?).map_err(in_file(path))
}

fn json<T: Serialize>(v: &T) -> Result<Report, CliError> {
    Ok(Report {
        body: to_json(v),
        code: crate::EXIT_OK,
    })
}

#[derive(Serialize)]
struct EvalOut {
    payoff: f64,
    mu: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Serialize)]
struct OptimizeOut {
    value: f64,
    method: BoundMethod,
    strategy: StrategyJson,
    trace: Vec<f64>,
    restarts: usize,
    seed: u64,
    best_restart: usize,
    converged: bool,
}

#[derive(Serialize)]
struct BoundOut {
    #[serde(flatten)]
    bound: BoundJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct WitnessOut {
    verdict: Verdict,
    seesaw_value: f64,
    bound_value: f64,
    bound_method: BoundMethod,
    margin: f64,
    strategy: StrategyJson,
}

#[derive(Serialize)]
struct LhsModelOut {
    weights: Vec<f64>,
    responses: Vec<Vec<Vec<f64>>>,
    states: Vec<OperatorJson>,
}

#[derive(Serialize)]
#[serde(tag = "verdict")]
enum LhsCheckOut {
    InLhs {
        residual: f64,
        model: LhsModelOut,
    },
    NotInLhs {
        gap: f64,
        value: f64,
        bound: f64,
        game: GameJson,
    },
    Undecided {
        residual: f64,
        iterations: usize,
    },
}

#[derive(Serialize)]
struct TeleportDim {
    d: usize,
    max_deviation: f64,
    bell_completeness: f64,
    bell_orthogonality: f64,
}

#[derive(Serialize)]
struct TeleportOut {
    trials: usize,
    seed: u64,
    dims: Vec<TeleportDim>,
}

#[derive(Serialize)]
struct ReconstructOut {
    max_deviation: f64,
    teleported: AssemblageJson,
    direct: AssemblageJson,
}

#[derive(Serialize)]
struct ValidateOut {
    diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub seesaw_value: f64,
    pub bound_value: f64,
    pub witnessed: bool,
}

pub(crate) fn compute_bound(
    kind: BoundKind,
    game: &Game,
    cfg: &RunConfig,
    cap: Option<u128>,
) -> Result<(BoundResult, Option<Vec<f64>>), CliError> {
    Ok(match kind {
        BoundKind::Lhv => (lhv_bound_capped(game, cap.unwrap_or(DEFAULT_CAP))?, None),
        BoundKind::Lhs => (lhs_bound_capped(game, cap.unwrap_or(DEFAULT_CAP))?, None),
        BoundKind::Separable => {
            let (b, res) = separable_bound_with(game, &cfg.seesaw_options())?;
            let trace = res.best_trace().to_vec();
            (b, Some(trace))
        }
    })
}

pub(crate) fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Game(GameCmd::Eval {
            game,
            state,
            strategy,
        }) => {
            let g = load_game(&game)?;
            let rho = load_state(&state)?;
            let strat = parse_strategy(&read(&strategy)?).map_err(in_file(&strategy))?;
            let dist = mu(&g, &rho, &strat)?;
            json(&EvalOut {
                payoff: payoff_of(&g, &dist),
                mu: dist.nested(),
            })
        }
        Command::Optimize { game, state } => {
            let g = load_game(&game)?;
            let rho = load_state(&state)?;
            let res = seesaw_with(&g, &rho, &cfg.seesaw_options())?;
            json(&OptimizeOut {
                value: res.value,
                method: BoundMethod::SearchLowerBound,
                strategy: StrategyJson::from_strategy(&res.strategy),
                trace: res.best_trace().to_vec(),
                restarts: res.restarts,
                seed: res.seed,
                best_restart: res.best_restart,
                converged: res.converged,
            })
        }
        Command::Bound { kind, game, cap } => {
            let g = load_game(&game)?;
            let (bound, trace) = compute_bound(kind, &g, cfg, cap)?;
            json(&BoundOut {
                bound: BoundJson::from_bound(&bound),
                trace,
            })
        }
        Command::Witness { game, state, bound } => {
            let g = load_game(&game)?;
            let rho = load_state(&state)?;
            let (b, _) = compute_bound(bound, &g, cfg, None)?;
            let rep = witness_check_with(
                &g,
                &rho,
                &b,
                &cfg.seesaw_options(),
                cfg.tolerance("margin", DEFAULT_MARGIN),
            )?;
            json(&WitnessOut {
                verdict: rep.verdict,
                seesaw_value: rep.seesaw_value,
                bound_value: rep.bound_value,
                bound_method: rep.bound_method,
                margin: rep.margin,
                strategy: StrategyJson::from_strategy(&rep.strategy),
            })
        }
        Command::Assemblage(AssemblageCmd::Steer { state, povms }) => {
            let rho = load_state(&state)?;
            let ps = parse_povms(&read(&povms)?).map_err(in_file(&povms))?;
            Ok(Report {
                body: assemblage_to_json(&steer_assemblage(&rho, &ps)?),
                code: crate::EXIT_OK,
            })
        }
        Command::Assemblage(AssemblageCmd::LhsCheck { assemblage }) => {
            let a = parse_assemblage(&read(&assemblage)?).map_err(in_file(&assemblage))?;
            let defaults = MembershipOptions::default();
            let opts = MembershipOptions {
                tolerance: cfg.tolerance("membership", defaults.tolerance),
                ..defaults
            };
            let out = match lhs_membership_with(&a, &opts)? {
                Membership::InLhs { model, residual } => LhsCheckOut::InLhs {
                    residual,
                    model: LhsModelOut {
                        weights: model.weights().to_vec(),
                        responses: model.responses().to_vec(),
                        states: model
                            .states()
                            .iter()
                            .map(OperatorJson::from_state)
                            .collect(),
                    },
                },
                Membership::NotInLhs {
                    game,
                    value,
                    bound,
                    gap,
                } => LhsCheckOut::NotInLhs {
                    gap,
                    value,
                    bound,
                    game: GameJson::from_game(&game),
                },
                Membership::Undecided {
                    residual,
                    iterations,
                } => LhsCheckOut::Undecided {
                    residual,
                    iterations,
                },
            };
            json(&out)
        }
        Command::Appendix(AppendixCmd::TeleportCheck { trials }) => {
            teleport_check(trials, cfg.seed)
        }
        Command::Appendix(AppendixCmd::Reconstruct { state, povms }) => {
            let rho = load_state(&state)?;
            let ps = parse_povms(&read(&povms)?).map_err(in_file(&povms))?;
            let (tele, direct) = reconstruct_assemblage(&rho, &ps)?;
            json(&ReconstructOut {
                max_deviation: tele.max_diff(&direct),
                teleported: AssemblageJson::from_assemblage(&tele),
                direct: AssemblageJson::from_assemblage(&direct),
            })
        }
        Command::Sweep {
            param,
            lo,
            hi,
            steps,
            game,
            bound,
        } => {
            let spec = SweepSpec {
                parameter: param,
                lo,
                hi,
                steps,
                bound,
            };
            spec.validate()?;
            let g = load_game(&game)?;
            let rows = sweep(&spec, &g, cfg)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => Ok(Report {
                    body: rows_to_csv(&rows)?,
                    code: crate::EXIT_OK,
                }),
                Format::Json => json(&rows),
            }
        }
        Command::Validate {
            game,
            state,
            strategy,
            povms,
            assemblage,
        } => validate(game, state, strategy, povms, assemblage),
    }
}

pub fn sweep(spec: &SweepSpec, game: &Game, cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let (bound, _) = compute_bound(spec.bound, game, cfg, None)?;
    let margin = cfg.tolerance("margin", DEFAULT_MARGIN);
    let opts = cfg.seesaw_options();
    spec.grid()
        .into_par_iter()
        .map(|w| {
            let rho = werner_state(w)?;
            let res = seesaw_with(game, &rho, &opts)?;
            Ok(SweepRow {
                param: w,
                seesaw_value: res.value,
                bound_value: bound.value,
                witnessed: res.value > bound.value + margin,
            })
        })
        .collect()
}

fn rows_to_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn teleport_check(trials: usize, seed: u64) -> Result<Report, CliError> {
    let mut dims = Vec::new();
    for (k, d) in [2usize, 3].into_iter().enumerate() {
        let mut dev = 0.0_f64;
        for i in 0..trials {
            let mut rng = rng_for(seed, (k * trials + i) as u64);
            let w = DensityOperator::new(random_density_with(&mut rng, d, d), vec![d])?;
            let out = teleport_identity(&w)?;
            dev = dev.max(max_abs_diff(out.matrix(), w.matrix()));
        }
        let bell = generalized_bell_povm(d)?;
        let total = bell
            .effects()
            .iter()
            .fold(qgames::qcore::CMatrix::zeros(d * d, d * d), |acc, e| {
                acc + e
            });
        let mut orth = 0.0_f64;
        for (i, a) in bell.effects().iter().enumerate() {
            for (j, b) in bell.effects().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((trace_product(a, b).re - want).abs());
            }
        }
        dims.push(TeleportDim {
            d,
            max_deviation: dev,
            bell_completeness: max_abs_diff(&total, &identity(d * d)),
            bell_orthogonality: orth,
        });
    }
    json(&TeleportOut { trials, seed, dims })
}

fn validate(
    game: Option<std::path::PathBuf>,
    state: Option<std::path::PathBuf>,
    strategy: Option<std::path::PathBuf>,
    povms: Option<std::path::PathBuf>,
    assemblage: Option<std::path::PathBuf>,
) -> Result<Report, CliError> {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut check = |path: &Path, f: &dyn Fn(&str) -> Result<(), Vec<Diagnostic>>| match read(path)
    {
        Ok(text) => {
            if let Err(d) = f(&text) {
                if let CliError::Validation(d) = in_file(path)(d) {
                    diags.extend(d);
                }
            }
        }
        Err(CliError::Validation(d)) => diags.extend(d),
        Err(CliError::Internal(m)) => diags.push(Diagnostic {
            location: path.display().to_string(),
            message: m,
        }),
    };
    if let Some(p) = &game {
        check(p, &|t| {
            let raw = from_json::<GameJson>(t)?.to_raw()?;
            let d = validate_raw(&raw);
            if d.is_empty() {
                Ok(())
            } else {
                Err(d)
            }
        });
    }
    if let Some(p) = &state {
        check(p, &|t| StateJson::parse(t)?.build().map(|_| ()));
    }
    if let Some(p) = &strategy {
        check(p, &|t| parse_strategy(t).map(|_| ()));
    }
    if let Some(p) = &povms {
        check(p, &|t| parse_povms(t).map(|_| ()));
    }
    if let Some(p) = &assemblage {
        check(p, &|t| parse_assemblage(t).map(|_| ()));
    }
    let code = if diags.is_empty() {
        crate::EXIT_OK
    } else {
        crate::EXIT_VALIDATION
    };
    Ok(Report {
        body: to_json(&ValidateOut { diagnostics: diags }),
        code,
    })
}
