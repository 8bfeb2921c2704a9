use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular or rank deficient within tolerance")]
    Singular,
    #[error("dense size guard exceeded: {size} > {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("invalid bracket: residual {lo} .. {hi} does not enclose target {target}")]
    InvalidBracket { lo: f64, hi: f64, target: f64 },
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: &str) -> Error {
    Error::Domain(String::from(msg))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
