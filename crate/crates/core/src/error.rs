use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains a NaN or infinite entry")]
    NonFiniteInput,

    #[error("shape error: {0}")]
    ShapeError(String),

    #[error("map is not injective: [T] = {min_mod:e} <= 1e-12 * ||T|| = {op_norm:e}")]
    NotInjective { min_mod: f64, op_norm: f64 },

    #[error("map is zero (operator norm is 0)")]
    ZeroMap,

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("vectors are not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("sampled image collapsed to zero norm; [T] is numerically 0")]
    ImageCollapse,

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ragged rows: line {line} has {found} values, expected {expected}")]
    RaggedRows {
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("non-finite entry at line {line}, column {column}")]
    NonFiniteEntry { line: usize, column: usize },

    #[error("shape mismatch: rows * cols = {expected} but data has {found} values")]
    ShapeMismatch { expected: usize, found: usize },
}

impl Error {
    /// Stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFiniteInput => "NonFiniteInput",
            Error::ShapeError(_) => "ShapeError",
            Error::NotInjective { .. } => "NotInjective",
            Error::ZeroMap => "ZeroMap",
            Error::ZeroVector => "ZeroVector",
            Error::NotOrthonormal(_) => "NotOrthonormal",
            Error::DomainError(_) => "DomainError",
            Error::ImageCollapse => "ImageCollapse",
            Error::Io { .. } => "IoError",
            Error::Parse { .. } => "ParseError",
            Error::RaggedRows { .. } => "RaggedRows",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
        }
    }
}
