use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QjdError {
    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("operator has no nonzero terms")]
    DegenerateOperator,

    #[error("LCU postselection annihilated the input (success probability {success_probability})")]
    DegenerateOutcome { success_probability: f64 },

    #[error("ill-conditioned epsilon: denominator {denominator:e}")]
    IllConditionedEpsilon { denominator: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl QjdError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QjdError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, QjdError>;
