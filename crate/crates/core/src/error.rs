use std::io;

use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("affinely degenerate point set (smallest singular value {sigma:.3e})")]
    Degenerate { sigma: f64 },

    #[error("critical value {value} exceeds r_max = r_conv/3 = {r_max}; shrink r or raise n")]
    Escalation { value: f64, r_max: f64 },

    #[error("least-squares fit is singular: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("Euler characteristic mismatch in trial {trial}: betti {chi_betti}, morse {chi_morse}")]
    EulerMismatch { trial: u64, chi_betti: i64, chi_morse: i64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
