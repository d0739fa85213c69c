use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Not enough observations to compute the requested quantity.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The input has zero variance, so the statistic is undefined.
    #[error("zero variance: {0}")]
    ZeroVariance(String),

    /// Too few distinct values above the Hill threshold.
    #[error("degenerate tail: {0}")]
    DegenerateTail(String),

    /// Input contains NaN or infinite values.
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    /// Input ordering violates a monotonicity requirement.
    #[error("unsorted input: {0}")]
    Unsorted(String),

    /// Instrument sets of two panel windows differ.
    #[error("instrument mismatch: {0}")]
    KeyMismatch(String),

    /// Internal bookkeeping disagreed with itself.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerically degenerate inputs
    /// (constant series, tied tails, zero-variance differences).
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::ZeroVariance(_) | Error::DegenerateTail(_))
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}
