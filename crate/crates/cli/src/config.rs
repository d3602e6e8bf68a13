//! Run configuration: built-in defaults, then an optional JSON config file,
//! then command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "FOURBODY_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// Effective settings of one run. Embedded verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Relative tolerance of the adaptive quadratures.
    pub tol: f64,
    /// Correlated-Gaussian basis size for the solver.
    pub budget: usize,
    /// Random candidates per growth step.
    pub pool: usize,
    pub refine_sweeps: usize,
    /// Largest admissible overlap condition number.
    pub condition_cap: f64,
    /// `None` picks the command's natural format (JSON for single reports,
    /// CSV for tables).
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tol: 1e-6,
            budget: 200,
            pool: 200,
            refine_sweeps: 0,
            condition_cap: 1e12,
            format: None,
            out: None,
        }
    }
}

/// Config file contents; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    tol: Option<f64>,
    budget: Option<usize>,
    pool: Option<usize>,
    refine_sweeps: Option<usize>,
    condition_cap: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

/// Flag values; `None` leaves the lower layer in place.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
    pub pool: Option<usize>,
    pub refine_sweeps: Option<usize>,
    pub condition_cap: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
            let f: ConfigFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("config file {}: {e}", path.display())))?;
            cfg.apply(Overrides {
                seed: f.seed,
                tol: f.tol,
                budget: f.budget,
                pool: f.pool,
                refine_sweeps: f.refine_sweeps,
                condition_cap: f.condition_cap,
                format: f.format,
                out: f.out,
            });
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
        self.tol = o.tol.unwrap_or(self.tol);
        self.budget = o.budget.unwrap_or(self.budget);
        self.pool = o.pool.unwrap_or(self.pool);
        self.refine_sweeps = o.refine_sweeps.unwrap_or(self.refine_sweeps);
        self.condition_cap = o.condition_cap.unwrap_or(self.condition_cap);
        self.format = o.format.or(self.format);
        self.out = o.out.or(self.out.take());
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Input(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.budget == 0 || self.pool == 0 {
            return Err(CliError::Input("budget and pool must be at least 1".into()));
        }
        if !(self.condition_cap > 1.0 && self.condition_cap.is_finite()) {
            return Err(CliError::Input(format!(
                "condition cap must be a finite number above 1, got {}",
                self.condition_cap
            )));
        }
        Ok(())
    }
}
