use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bin width mismatch: {left} ns vs {right} ns")]
    BinWidthMismatch { left: f64, right: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The input is not a valid pair-interval generator: the renewal
    /// recursion produced a negative probability.
    #[error("non-physical input: bin {bin} evaluates to {value:e}")]
    NonPhysical { bin: usize, value: f64 },

    #[error("series did not converge within {terms} terms (next term {residual:e})")]
    NonConvergence { terms: usize, residual: f64 },

    #[error("tail is not flat: converged window {window_ns} ns is shorter than {required_ns} ns")]
    TailNotFlat { window_ns: f64, required_ns: f64 },

    #[error("no bunching to fit: curve maximum is {max}")]
    NoBunching { max: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    FitDidNotConverge { iterations: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("histogram has zero start events")]
    ZeroStartCount,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's parameters or data; false for
    /// I/O failures and numerical procedures that did not converge.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Io(_) | Error::NonConvergence { .. } | Error::FitDidNotConverge { .. } => false,
            Error::Csv(e) => !matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::Json(e) => !e.is_io(),
            _ => true,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn ensure_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must lie in [0, 1], got {value}"),
        ))
    }
}
