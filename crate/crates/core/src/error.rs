use thiserror::Error;

/// Errors raised by the simulation library.
///
/// `Dimension`, `Parse`, `Config` and `Generation` describe bad input. The
/// `Normalization` and `Orthogonality` variants mean an internal invariant broke
/// during evolution, which is an engine bug rather than a user error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{n_qubits} qubits exceeds the dense cap of {cap}")]
    QubitCap { n_qubits: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("state norm drifted to {norm} (engine invariant)")]
    Normalization { norm: f64 },

    #[error("registers {a} and {b} lost orthogonality: |<a|b>| = {overlap:e}")]
    Orthogonality { a: usize, b: usize, overlap: f64 },

    #[error("eigensolver failed to converge: {0}")]
    NoConvergence(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("problem generation failed: {0}")]
    Generation(String),
}

impl Error {
    /// True for errors that indicate a broken runtime invariant rather than bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, Error::Normalization { .. } | Error::Orthogonality { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
