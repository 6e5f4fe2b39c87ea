use std::collections::BTreeMap;
use std::path::PathBuf;

use qgames::bounds::SeesawOptions;
use qgames::games::Diagnostic;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Tolerance keys accepted by `--tol KEY=VALUE`.
pub const TOLERANCE_KEYS: [&str; 3] = ["seesaw", "margin", "membership"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub restarts: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 10,
            tolerances: BTreeMap::new(),
            output: None,
            format: None,
        }
    }
}

fn bad(location: &str, message: impl Into<String>) -> CliError {
    CliError::Validation(vec![Diagnostic {
        location: location.into(),
        message: message.into(),
    }])
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.restarts == 0 {
            return Err(bad("--restarts", "must be at least 1"));
        }
        for (k, v) in &self.tolerances {
            if !TOLERANCE_KEYS.contains(&k.as_str()) {
                return Err(bad(
                    "--tol",
                    format!("unknown tolerance {k:?}; expected one of {TOLERANCE_KEYS:?}"),
                ));
            }
            if !v.is_finite() || *v <= 0.0 {
                return Err(bad(
                    "--tol",
                    format!("{k} must be a positive number, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn parse_tolerances(pairs: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
        let mut out = BTreeMap::new();
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| bad("--tol", format!("expected KEY=VALUE, got {p:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| bad("--tol", format!("{v:?} is not a number")))?;
            out.insert(k.trim().to_string(), v);
        }
        Ok(out)
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn seesaw_options(&self) -> SeesawOptions {
        let mut o = SeesawOptions::new(self.restarts, self.seed);
        o.tolerance = self.tolerance("seesaw", o.tolerance);
        o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    /// Werner mixing weight `w` in [0, 1].
    WernerW,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BoundKind {
    Lhv,
    Lhs,
    Separable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub bound: BoundKind,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi {
            return Err(bad(
                "--lo/--hi",
                format!("empty range [{}, {}]", self.lo, self.hi),
            ));
        }
        if self.steps < 2 {
            return Err(bad("--steps", "need at least 2 grid points"));
        }
        match self.parameter {
            SweepParameter::WernerW if self.lo < 0.0 || self.hi > 1.0 => {
                Err(bad("--lo/--hi", "Werner weight must stay within [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// `lo + (hi − lo)·i/(steps − 1)`, ending exactly at `hi`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }
}
