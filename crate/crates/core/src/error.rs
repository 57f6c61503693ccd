use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("rewiring failed for {failed} of {requested} edges")]
    RewireFailure { requested: usize, failed: usize },

    #[error("unstable autoregression: spectral radius bound {radius} >= {limit}")]
    Unstable { radius: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("network too large for exact enumeration: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("collinear design (condition number {condition:.3e}); offending columns: {}", columns.join(", "))]
    Collinear { condition: f64, columns: Vec<String> },

    #[error("perfect or quasi-complete separation: {0}")]
    Separation(String),

    #[error("degenerate outcome: {0}")]
    Degenerate(String),

    #[error("stratum error: {0}")]
    Stratum(String),

    #[error("unknown term `{0}`")]
    UnknownTerm(String),

    #[error("estimate on stability boundary: {0}")]
    Boundary(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
