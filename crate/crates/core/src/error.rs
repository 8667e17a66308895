use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// The variants split into three families that the CLI maps onto exit codes:
/// input problems (`Parse`, `InvalidField`, `InvalidPresentation`, `Instance`,
/// ...), resource exhaustion (`TruncationExhausted`, `SuperficialExhausted`),
/// and internal signals that the caller is expected to handle
/// (`TruncationInsufficient` asks for a larger truncation degree).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("{0} is not a prime (characteristic must be a prime below 2^31)")]
    InvalidField(u64),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("linear change of coordinates is not invertible")]
    SingularChange,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0}")]
    Precondition(String),

    #[error("linear form is zero")]
    ZeroForm,

    #[error("hypersurface equation vanishes modulo the chosen linear form")]
    HypersurfaceKilled,

    #[error("truncation degree {truncation} too small: {reason}")]
    TruncationInsufficient { truncation: usize, reason: String },

    #[error("truncation cap {cap} reached without stabilization: {reason}")]
    TruncationExhausted { cap: usize, reason: String },

    #[error("no superficial form found after {attempts} attempts: {diagnostics}")]
    SuperficialExhausted { attempts: usize, diagnostics: String },

    #[error("instance file line {line}, column {column}: {message}")]
    Instance { line: usize, column: usize, message: String },
}

impl Error {
    pub(crate) fn truncation(truncation: usize, reason: impl Into<String>) -> Self {
        Error::TruncationInsufficient { truncation, reason: reason.into() }
    }

    /// True for errors caused by the input rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::InvalidField(_)
                | Error::InvalidPresentation(_)
                | Error::Instance { .. }
                | Error::SingularChange
                | Error::Dimension(_)
                | Error::ZeroForm
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
