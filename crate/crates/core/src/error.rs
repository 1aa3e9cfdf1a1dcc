use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("basis dimension C({n}, {k}) overflows the index type")]
    DimensionOverflow { n: u64, k: u64 },

    #[error("start vector is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("NaN encountered in {0}")]
    NotFinite(&'static str),

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },

    #[error("time step underflow at t = {t}: dt = {dt:e}")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("GMRES did not converge in {iterations} iterations (residual history: {history:?})")]
    GmresNoConvergence { iterations: usize, history: Vec<f64> },

    #[error("ground-state solver did not converge after {restarts} restarts (residual {residual:e})")]
    GroundStateNoConvergence { restarts: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
