use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("symmetry error: {0}")]
    Symmetry(String),

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// The operator has no finite band, so its degree cannot be bounded by a window.
    #[error("degree is unbounded for {0}")]
    UnsupportedDegree(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("QL iteration did not converge for eigenvalue {index} after {sweeps} sweeps")]
    Convergence { index: usize, sweeps: usize },

    /// Input is well formed but carries too little data to draw a conclusion.
    #[error("diagnostic: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
