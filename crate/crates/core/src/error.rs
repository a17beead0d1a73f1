use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("lattice does not cover the transform: tail mass {tail:.3e} exceeds {limit:.3e}")]
    Coverage { tail: f64, limit: f64 },

    #[error("route {requested} unavailable for this matrix; valid routes: {valid}")]
    Route { requested: String, valid: String },

    #[error("inadmissible exponents: {0}")]
    Admissibility(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
