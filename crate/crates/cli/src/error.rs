use std::path::Path;

use serde::Serialize;
use thiserror::Error;

/// Exit code for unreadable or invalid input, including domain errors.
pub const EXIT_INPUT: u8 = 2;
/// Exit code for numerical failures inside a computation.
pub const EXIT_NUMERICAL: u8 = 3;
/// Exit code for a solver result that contradicts the criterion.
pub const EXIT_INCONSISTENT: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] fourbody::Error),
}

impl CliError {
    pub fn read(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("cannot read {}: {e}", path.display()))
    }

    pub fn kind(&self) -> &'static str {
        use fourbody::Error as E;
        match self {
            CliError::Input(_) => "input",
            CliError::Write { .. } => "io",
            CliError::Core(e) => match e {
                E::Domain(_) => "domain",
                E::Input(_) | E::Json(_) => "input",
                E::Quadrature { .. } => "quadrature",
                E::Numerical(_) => "numerical",
                E::IllConditioned { .. } => "ill_conditioned",
                E::Inconsistency(_) => "inconsistency",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "input" | "domain" => EXIT_INPUT,
            "inconsistency" => EXIT_INCONSISTENT,
            _ => EXIT_NUMERICAL,
        }
    }

    /// Single-line JSON record for stderr.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: Body<'a>,
        }
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
            exit_code: u8,
        }
        serde_json::to_string(&Record {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
                exit_code: self.exit_code(),
            },
        })
        .expect("error record serializes")
    }
}
