use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("embedding index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("ideal generated by zero elements only")]
    ZeroIdeal,

    #[error("grade overflow: {a} + {b} > {n}")]
    GradeOverflow { a: usize, b: usize, n: usize },

    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(usize, usize),

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("ambient dimension {0} exceeds the supported maximum of 16")]
    AmbientTooLarge(usize),

    #[error("basis is rank deficient")]
    RankDeficient,

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("dimension out of range: {0}")]
    Dimension(String),

    #[error("subspaces live over different fields")]
    FieldMismatch,

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("lattice reduction failed: {0}")]
    Reduction(String),

    #[error("no lattice point found in the body after {attempts} attempts (last scale {last_scale:.3e})")]
    NotFound { attempts: usize, last_scale: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("constructed vector is dependent on the complement basis")]
    DependentW,

    #[error("retry budget exhausted: {0}")]
    RetryExhausted(String),

    #[error("too few record points ({0}); at least 5 are needed")]
    TooFewRecords(usize),

    #[error("integer overflow in lattice transform")]
    Overflow,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), msg: msg.into() }
}
