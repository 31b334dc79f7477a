use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A non-refinable input cannot deliver the requested accuracy.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("no consecutive pair of semigroup elements lies in ({lo}, {hi}]")]
    EmptyWindow { lo: u128, hi: u128 },

    #[error("generator {generator} is not coprime to modulus {modulus}")]
    NotCoprime { generator: u64, modulus: u64 },

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("no rational point found in the sampled orbit closure")]
    NoRationalPointFound,

    #[error("no rational candidate at level {level}")]
    NoCandidate { level: usize },

    #[error("component {index} of the curve direction is zero")]
    ZeroComponent { index: usize },

    #[error("empty sample or result set")]
    Empty,

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error in {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// Stable upper-case identifier for reports and exit-code mapping.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::PrecisionExhausted(_) => "PRECISION_EXHAUSTED",
            Error::EmptyWindow { .. } => "EMPTY_WINDOW",
            Error::NotCoprime { .. } => "NOT_COPRIME",
            Error::BudgetExhausted(_) => "BUDGET_EXHAUSTED",
            Error::NoRationalPointFound => "NO_RATIONAL_POINT_FOUND",
            Error::NoCandidate { .. } => "NO_CANDIDATE",
            Error::ZeroComponent { .. } => "ZERO_COMPONENT",
            Error::Empty => "EMPTY",
            Error::Overflow(_) => "OVERFLOW",
            Error::Parse { .. } => "PARSE",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }

    /// Failures of a finite search or sample, as opposed to bad input.
    pub fn is_budget_failure(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_)
                | Error::BudgetExhausted(_)
                | Error::NoRationalPointFound
                | Error::NoCandidate { .. }
                | Error::Empty
        )
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidInput(reason.into())
    }
}
