use thiserror::Error;

use crate::expr::{DiffError, EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("evaluation failed at ({point}): {source}")]
    EvalAt {
        point: String,
        #[source]
        source: EvalError,
    },
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
