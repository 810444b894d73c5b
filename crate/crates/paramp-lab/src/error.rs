//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. The CLI maps error kinds to
//! process exit codes: validation and input problems exit 2, numerical
//! failures (root finding, fit convergence, fixed-point iteration) exit 3,
//! and command-line usage errors exit 64.

use crate::fit::FitResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical parameter is outside its meaningful domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value fell outside an interval the operation is defined on.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Caller passed inconsistent or malformed arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Configuration or input data failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A text input could not be parsed.
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    /// A regression design matrix is rank deficient.
    #[error("rank error: {0}")]
    Rank(String),

    /// Root bracketing failed; the reported interval contains no sign change.
    #[error("bracketing failure in {context}: no sign change on [{lo}, {hi}]")]
    Bracketing { context: String, lo: f64, hi: f64 },

    /// Threshold quantities are undefined for a linear (kerr = 0) mode.
    #[error("no bistability threshold: mode has zero Kerr coefficient")]
    NoThreshold,

    /// An operation that requires a stable pump branch was given an unstable one.
    #[error("branch {branch} is dynamically unstable; linearized gain is undefined there")]
    UnstableBranch { branch: usize },

    /// Circle fit found no resonance feature above the noise floor.
    #[error("no resonance found: {0}")]
    NoResonance(String),

    /// Iterative fit failed to converge; the best iterate is attached.
    #[error("fit did not converge after {iterations} iterations ({context})")]
    FitConvergence {
        context: String,
        iterations: usize,
        best: Box<FitResult>,
    },

    /// Compression fixed point failed to settle; the last iterate is attached.
    #[error(
        "fixed point did not settle after {iterations} iterations \
         (last n_pump = {n_pump:.6e}, n_signal = {n_signal:.6e})"
    )]
    FixedPoint {
        iterations: usize,
        n_pump: f64,
        n_signal: f64,
    },

    /// A parameter search exhausted its grid without reaching the target.
    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::OutOfRange { .. }
            | Error::InvalidArgument(_)
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::Rank(_)
            | Error::NoThreshold
            | Error::UnstableBranch { .. }
            | Error::Io { .. }
            | Error::Json(_) => 2,
            Error::Bracketing { .. }
            | Error::NoResonance(_)
            | Error::FitConvergence { .. }
            | Error::FixedPoint { .. }
            | Error::SearchFailed(_) => 3,
        }
    }
}
