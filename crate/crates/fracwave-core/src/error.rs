//! Error type shared by every module of the crate.

/// Errors produced by solvers, assemblers and special functions.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grids, sources or study parameters are inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value grew past the range of 64-bit floats.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A linear solve met a zero or non-positive pivot.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// The requested computation does not fit the available budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A spectral truncation tolerance could not be met.
    #[error(
        "truncation tolerance not reached: requested {requested:e}, \
         achieved {achieved:e} with {modes} modes"
    )]
    Truncation {
        requested: f64,
        achieved: f64,
        modes: usize,
    },

    /// File I/O failure, annotated with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
