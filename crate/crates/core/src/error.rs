use thiserror::Error;

/// Errors raised by the library.
///
/// Validation errors describe bad input. [`Error::Invariant`] means a
/// mathematical identity that must hold was observed to fail; it always names
/// the identity so the failure can be traced back to the check that fired.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("table length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit count {n} out of range for {what} (max {max})")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("balancing failed after {tries} tries; best fourth moment {best} (target {target})")]
    BalanceExhausted { tries: usize, best: f64, target: f64 },

    #[error("table is not balanced: row sum {row_sum} exceeds 3 (run balance first)")]
    Unbalanced { row_sum: f64 },

    #[error("no calibration entry for n = {n}, k = {k}")]
    MissingCalibration { n: usize, k: usize },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invariant violated ({identity}): {detail}")]
    Invariant { identity: &'static str, detail: String },
}

impl Error {
    pub(crate) fn invariant(identity: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant { identity, detail: detail.into() }
    }

    /// True for internal-consistency failures, false for input validation.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
