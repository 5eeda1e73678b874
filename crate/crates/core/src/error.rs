use thiserror::Error;

use crate::beta::BetaError;
use crate::bishop::BishopError;
use crate::curve::CurveError;
use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Bishop(#[from] BishopError),
    #[error(transparent)]
    Beta(#[from] BetaError),
    #[error("unknown gallery entry {0:?}")]
    UnknownGallery(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::UnknownGallery(_) | Error::Input(_) => 2,
            Error::Curve(CurveError::NotRegular { .. }) => 3,
            Error::Curve(
                CurveError::Csv(_) | CurveError::TooFewSamples(_) | CurveError::NonMonotone(_) | CurveError::NonFinite(_),
            ) => 2,
            Error::Bishop(BishopError::NoBasePoint) => 5,
            Error::Bishop(BishopError::Curve(CurveError::NotRegular { .. })) => 3,
            Error::Bishop(BishopError::NonFinite(_) | BishopError::TooShort) => 2,
            Error::Beta(BetaError::NotLiftable { .. } | BetaError::Unsupported { .. }) => 4,
            _ => 1,
        }
    }
}
