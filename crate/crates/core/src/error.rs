//! Error types shared by the analysis library.

use thiserror::Error;

/// Errors produced by parsing, validation, and numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph file, tagged with a 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Graph-level validation failure (ids, self-loops, weights, headers).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// Operands with incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterative float kernel (SVD, Schur) did not converge.
    #[error("numeric kernel failed to converge: {0}")]
    NonConvergence(String),

    /// Overflow or non-finite values in a float computation.
    #[error("numeric overflow: {0}")]
    Overflow(String),

    /// Steering refused because the output Gramian is singular or
    /// too ill-conditioned to invert reliably.
    #[error("singular output Gramian: {0}")]
    SingularGramian(String),

    /// Two independently computed certificates disagree. This cannot happen
    /// for valid inputs; it indicates a bug in the implementation.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),

    /// Invalid argument supplied to an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("bad sidecar spec: {0}")]
    Sidecar(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
