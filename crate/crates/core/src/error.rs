use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Input(String),

    /// Adaptive quadrature ran out of budget before reaching its tolerance.
    #[error("quadrature did not converge: value {value:.6e}, error estimate {error:.3e}")]
    Quadrature { value: f64, error: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Overlap matrix too close to singular to trust the Rayleigh-Ritz values.
    #[error("basis rejected: condition number {condition:.3e} exceeds cap {cap:.3e}")]
    IllConditioned { condition: f64, cap: f64 },

    /// The variational solver certified binding for a system the criterion
    /// proves unstable. Either the solver or the criterion is wrong.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
