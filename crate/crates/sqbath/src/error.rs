//! Error type shared across the crate.
//!
//! Two broad classes matter to callers: configuration/input problems
//! (bad parameters, violated invariants, unknown labels or keys) and
//! numerical failures (singular solves, non-unique steady states,
//! solver-produced states breaking density-matrix invariants). The CLI
//! maps the former to exit code 2 and the latter to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or input: violated parameter invariant, unknown
    /// label/key, malformed config file. Messages name the violated
    /// invariant and the offending value.
    #[error("config error: {0}")]
    Config(String),

    /// Numerical failure: singular linear solve, degenerate steady state,
    /// output state violating density-matrix invariants, step-size underflow.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI contract assigns to this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerical(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for a config-class error.
pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// Shorthand for a numerical-class error.
pub(crate) fn numerical_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numerical(msg.into()))
}
