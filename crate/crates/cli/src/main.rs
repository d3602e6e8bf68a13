//! `fourbody`: instability criterion and verification runs for four unit
//! charges `(m1+, m2-, m3+, m4-)`.
//!
//! Exit codes: `criterion` returns 0 for proven unstable and 1 for
//! indeterminate, `chain` returns 0 iff every check passes and 1 otherwise.
//! All commands return 2 on input or domain errors, 3 on numerical failures
//! and 4 when the solver contradicts the criterion; errors are also written
//! to stderr as a one-line JSON record.

mod commands;
mod config;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fourbody::ecg::MassFamily;

use config::{Format, Overrides, RunConfig, CONFIG_ENV};
use error::CliError;

#[derive(Parser)]
#[command(name = "fourbody", version, about = "Stability criterion for four-body Coulomb systems")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON file with defaults for the run configuration
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Correlated-Gaussian basis size
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Random candidates per growth step
    #[arg(long, global = true)]
    pool: Option<usize>,

    /// Refinement sweeps after growth
    #[arg(long, global = true)]
    sweeps: Option<usize>,

    /// Largest admissible overlap condition number
    #[arg(long, global = true)]
    cap: Option<f64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// (m, m, 1, 1)
    Symmetric,
    /// (m1, 1, m3, 1)
    TwoParameter,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one system (exit 0 proven unstable, 1 indeterminate)
    Criterion {
        #[arg(long)]
        system: PathBuf,
    },
    /// Run the scalar checks at one canonical mu_R (exit 0 iff all pass)
    Chain {
        /// Inter-pair reduced mass in the mu_x = 2 frame
        #[arg(long, allow_negative_numbers = true)]
        mu_r: Option<f64>,
        #[arg(long, conflicts_with = "mu_r")]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 400)]
        grid_points: usize,
    },
    /// Split effective potentials against their envelopes (CSV)
    Veff {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Two-center ground energy over separations (CSV)
    Twocenter {
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value_t = 1.0)]
        mu_r: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4,8")]
        separations: Vec<f64>,
        /// Gaussian exponents per center
        #[arg(long, default_value_t = 26)]
        basis_count: usize,
    },
    /// Variational ground energy and binding certification (JSON)
    Solve {
        #[arg(long)]
        system: PathBuf,
    },
    /// Verdicts (and optionally solver margins) over a mass family (CSV)
    Map {
        #[arg(long, value_enum)]
        family: Family,
        /// `m,m,...` for symmetric, `m1:m3,...` for two-parameter
        #[arg(long)]
        grid: String,
        /// Also run the solver at every point
        #[arg(long)]
        probe: bool,
    },
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let g = cli.global;
    let cfg = RunConfig::resolve(
        g.config.as_deref(),
        Overrides {
            seed: g.seed,
            tol: g.tol,
            budget: g.budget,
            pool: g.pool,
            refine_sweeps: g.sweeps,
            condition_cap: g.cap,
            format: g.format,
            out: g.out,
        },
    )?;
    match cli.command {
        Command::Criterion { system } => commands::criterion(&cfg, &system),
        Command::Chain {
            mu_r,
            system,
            samples,
            grid_points,
        } => commands::chain(&cfg, mu_r, system.as_deref(), samples, grid_points),
        Command::Veff { system, samples } => commands::veff(&cfg, &system, samples),
        Command::Twocenter {
            coupling,
            mu_r,
            separations,
            basis_count,
        } => commands::two_center(&cfg, coupling, mu_r, separations, basis_count),
        Command::Solve { system } => commands::solve(&cfg, &system),
        Command::Map { family, grid, probe } => {
            let family = match family {
                Family::Symmetric => MassFamily::Symmetric,
                Family::TwoParameter => MassFamily::TwoParameter,
            };
            commands::map(&cfg, family, &grid, probe)
        }
    }
    .and_then(|outcome| {
        output::emit(&outcome.text, cfg.out.as_deref())?;
        Ok(outcome)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => ExitCode::from(outcome.exit),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
