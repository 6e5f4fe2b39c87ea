//! `qgames` command-line front end.
//!
//! Every subcommand prints JSON on standard output, except `sweep`, which
//! writes CSV by default. Exit codes: 0 success, 2 validation failure
//! (diagnostics on standard output), 1 internal error, 64 unknown or
//! missing subcommand.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qgames::games::Diagnostic;

pub use config::{BoundKind, Format, RunConfig, SweepParameter, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "qgames",
    version,
    about = "Quantum-refereed nonlocality games: payoffs, bounds and witnesses"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// PRNG seed for randomized searches.
    #[arg(long, global = true, env = "QGAMES_SEED")]
    pub seed: Option<u64>,
    /// Independent seesaw restarts.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Tolerance override, KEY=VALUE with KEY one of seesaw, margin, membership.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    /// Write the result to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; csv is only available for sweep.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a fixed strategy.
    #[command(subcommand)]
    Game(GameCmd),
    /// Seesaw optimization of both players' measurements on a state.
    Optimize {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Classical bound of a game.
    Bound {
        #[arg(value_enum)]
        kind: BoundKind,
        #[arg(long)]
        game: PathBuf,
        /// Largest strategy space to enumerate.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Does the state beat the chosen bound on the game?
    Witness {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        bound: BoundKind,
    },
    /// Steering assemblages and local-hidden-state checks.
    #[command(subcommand)]
    Assemblage(AssemblageCmd),
    /// Teleportation and reconstruction checks.
    #[command(subcommand)]
    Appendix(AppendixCmd),
    /// Scan a state family and report seesaw value, bound and witness flag
    /// per grid point.
    ///
    /// CSV columns, in order: param, seesaw_value, bound_value, witnessed.
    /// Numbers use the shortest representation that parses back to the same
    /// double; witnessed is true or false.
    Sweep {
        #[arg(long, value_enum, default_value = "werner-w")]
        param: SweepParameter,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum)]
        bound: BoundKind,
    },
    /// Check input files and list every problem found.
    Validate {
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long)]
        povms: Option<PathBuf>,
        #[arg(long)]
        assemblage: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GameCmd {
    /// Average payoff and outcome distribution of a strategy.
    Eval {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AssemblageCmd {
    /// Bob's conditional states after Alice measures each setting.
    Steer {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povms: PathBuf,
    },
    /// Local-hidden-state model or steering-game violation.
    LhsCheck {
        #[arg(long)]
        assemblage: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AppendixCmd {
    /// Teleportation identity and Bell measurement checks on random states.
    TeleportCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Two-path reconstruction of an assemblage through teleportation.
    Reconstruct {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povms: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Validation(Vec<Diagnostic>),
    Internal(String),
}

impl From<qgames::Error> for CliError {
    fn from(e: qgames::Error) -> Self {
        CliError::Validation(vec![Diagnostic {
            location: "input".into(),
            message: e.to_string(),
        }])
    }
}

impl From<Vec<Diagnostic>> for CliError {
    fn from(d: Vec<Diagnostic>) -> Self {
        CliError::Validation(d)
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct DiagnosticsOut<'a> {
    diagnostics: &'a [Diagnostic],
}

/// Output of a successful command.
pub(crate) struct Report {
    pub body: String,
    /// Nonzero when the command ran but found problems (validate).
    pub code: i32,
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    return Outcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
            return Outcome {
                code,
                stdout: String::new(),
                stderr: text,
            };
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(cli)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            Err(CliError::Internal(msg))
        });
    match result {
        Ok(out) => out,
        Err(CliError::Validation(d)) => Outcome {
            code: EXIT_VALIDATION,
            stdout: qgames::io::to_json(&DiagnosticsOut { diagnostics: &d }),
            stderr: d.iter().map(|x| format!("error: {x}\n")).collect(),
        },
        Err(CliError::Internal(msg)) => Outcome {
            code: EXIT_INTERNAL,
            stdout: String::new(),
            stderr: format!("internal error: {msg}\n"),
        },
    }
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let g = cli.global;
    let defaults = RunConfig::default();
    let cfg = RunConfig {
        seed: g.seed.unwrap_or(defaults.seed),
        restarts: g.restarts.unwrap_or(defaults.restarts),
        tolerances: RunConfig::parse_tolerances(&g.tol)?,
        output: g.output,
        format: g.format,
    };
    cfg.validate()?;
    let is_sweep = matches!(cli.command, Command::Sweep { .. });
    if cfg.format == Some(Format::Csv) && !is_sweep {
        return Err(CliError::Validation(vec![Diagnostic {
            location: "--format".into(),
            message: "csv output is only available for sweep".into(),
        }]));
    }
    let report = commands::dispatch(cli.command, &cfg)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, &report.body)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        return Ok(Outcome {
            code: report.code,
            stdout: String::new(),
            stderr: String::new(),
        });
    }
    Ok(Outcome {
        code: report.code,
        stdout: report.body,
        stderr: String::new(),
    })
}
