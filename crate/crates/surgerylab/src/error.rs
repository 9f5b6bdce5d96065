use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("expected a positive value, got {0}")]
    NotPositive(String),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("framing at index {0} is not +1 or -1")]
    NotUnitFraming(usize),
    #[error("matrix is not positive-definite")]
    NotPositiveDefinite,
    #[error("surgery coefficient 0 makes the first homology infinite")]
    InfiniteHomology,
    #[error("no embeddable slope in the scan window")]
    NoEmbeddableSlope,
    #[error("index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
