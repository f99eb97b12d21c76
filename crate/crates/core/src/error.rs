use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Capability(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("symbol not positive: grid minimum {min:.3e} at or below floor {floor:.1e} (M = {grid})")]
    SymbolNotPositive { min: f64, floor: f64, grid: usize },

    #[error("factorization residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("support leak {leak:.3e} exceeds tolerance {tolerance:.1e}")]
    LeakTooLarge { leak: f64, tolerance: f64 },

    #[error("coefficient field is not symmetric (defect {0:.3e})")]
    Asymmetric(f64),

    #[error("grid of size {grid} is too small for radius {radius}")]
    GridTooSmall { grid: usize, radius: usize },

    #[error("index {0:?} is not in the half-space")]
    NotInHalfSpace(Vec<i64>),

    #[error("window of {size} unknowns exceeds the dense cap {cap}")]
    WindowTooLarge { size: usize, cap: usize },

    #[error("matrix is singular or ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("insufficient samples: {got} usable, need {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
