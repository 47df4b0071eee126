use thiserror::Error;

/// Errors raised while building, verifying or transforming channels and certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionLimit { dim: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size limit exceeded: {what} = {value} exceeds {max}")]
    SizeLimit {
        what: &'static str,
        value: String,
        max: u64,
    },

    #[error("integer overflow in exact rational arithmetic")]
    Overflow,

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// The mixture does not factor as `T ⊗ S_k`.
    #[error("hypothesis failure: mixture is not of the form T ⊗ S_k (Choi distance {distance:e})")]
    HypothesisFailure { distance: f64 },

    #[error("embedding mismatch: {0}")]
    EmbeddingMismatch(String),

    #[error("not a trace-preserving unital *-homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("unknown zoo entry `{0}`")]
    UnknownName(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("cannot parse rational `{0}`")]
    RationalParse(String),
}

impl Error {
    /// Process exit code for this error: 3 for exhausted resource bounds, 1 for a
    /// refuted hypothesis, 2 for malformed or inconsistent input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionLimit { .. } | Error::SizeLimit { .. } | Error::Overflow => 3,
            Error::HypothesisFailure { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
