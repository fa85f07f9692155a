use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {value} outside the knot range [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not symmetric positive definite (pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("matrix is singular (zero pivot at row {0})")]
    Singular(usize),

    #[error("zero diagonal entry at row {0}")]
    ZeroDiagonal(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("dense oracle of dimension {size} exceeds the cap of {cap}")]
    OracleSize { size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
