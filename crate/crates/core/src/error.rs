use thiserror::Error;

/// Errors raised across the crate.
///
/// Identity violations are not errors: validators return reports. The
/// variants here cover malformed input, unmet preconditions and internal
/// invariant failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("subspace containment violated: {0}")]
    NotContained(String),
    #[error("complex mismatch in {0}")]
    ComplexMismatch(String),
    #[error("unsupported degree {0} for this operation")]
    UnsupportedDegree(i32),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("factorization did not stabilize within {stages} stages")]
    NonTermination {
        stages: usize,
        /// JSON rendering of the partial tower, for diagnosis.
        partial: String,
    },
    #[error("no lift exists for the given square")]
    NoLift,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    pub(crate) fn dims(context: &str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context: context.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
