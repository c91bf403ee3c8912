//! Crate-wide error type.

use num_bigint::BigInt;
use thiserror::Error;

use crate::mat::MatError;
use crate::qfield::QfError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] QfError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("matrix {0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("form discriminant {0} is not a positive non-square")]
    NotIndefinite(BigInt),
    #[error("discriminant {0} is not of the shape r²±4, so no matrix has this form")]
    NoPreimage(BigInt),
    #[error("form {0} is not primitive (content {1})")]
    NotPrimitive(String, BigInt),
    #[error("|m|={m} is too large for the cycle method (need 4m² < {disc})")]
    UnsupportedRange { m: BigInt, disc: BigInt },
    #[error("singular matrix {0}")]
    Singular(String),
    #[error("search bound {bound} exceeded while {what}")]
    BoundExceeded { what: String, bound: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
