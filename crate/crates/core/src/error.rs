use thiserror::Error;

/// Errors surfaced by the library.
///
/// Variants are grouped so a caller can map them onto coarse exit classes:
/// invalid inputs ([`Error::is_domain`]), I/O and parsing
/// ([`Error::is_io`]), and numerical divergence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    InvalidDimension,

    #[error("sparsity {s_star} outside the valid range 1..={p}")]
    InvalidSparsity { s_star: usize, p: usize },

    #[error("measurement count must be at least 1")]
    InvalidCount,

    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("point lies outside the prior support (|theta| > H1)")]
    OutOfSupport,

    #[error("non-finite state encountered at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("chain contains no samples")]
    EmptyChain,

    #[error("metric undefined for a zero ground-truth signal")]
    UndefinedMetric,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed PGM at byte {offset}: {msg}")]
    PgmParse { offset: usize, msg: String },

    #[error("image with {p} coefficients exceeds the {limit} size guard")]
    SizeGuard { p: usize, limit: usize },

    #[error("parse error in {path}: {msg}")]
    FileFormat { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Invalid parameters or data supplied by the caller.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::Io(_)
                | Error::FileFormat { .. }
                | Error::PgmParse { .. }
                | Error::Divergence { .. }
        )
    }

    /// File-system or parsing failure.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::FileFormat { .. } | Error::PgmParse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
