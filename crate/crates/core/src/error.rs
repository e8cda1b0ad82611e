use std::io;

use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid input: {0}")]
    Input(String),

    /// The requested object exceeds a size cap (variable count, LP size, register dimension).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A DSL expression parsed but cannot be turned into a table.
    #[error("elaboration failed: {0}")]
    Elaborate(String),

    #[error("malformed table file: {0}")]
    Format(String),

    /// Two computations that must agree did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("register layout mismatch: {0}")]
    Layout(String),

    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
