use thiserror::Error;

use crate::asymptotics::DecayClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("curvature evaluation failed at r = {r}: {message}")]
    Profile { r: f64, message: String },

    #[error("no grid points in the requested range")]
    EmptyRange,

    #[error("{value} is outside the grid range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("tail window holds {found} samples, at least {needed} are required")]
    InsufficientTail { found: usize, needed: usize },

    #[error("decay class is {found:?}, this operation requires Fast")]
    ClassMismatch { found: DecayClass },

    #[error("s = {0} is not a local minimum of v")]
    NotALocalMin(f64),

    #[error("both bracket endpoints classify as {0:?}")]
    BracketInvalid(DecayClass),

    #[error("classification stayed Undetermined for {0} consecutive bisection steps")]
    Inconclusive(usize),

    #[error("unknown or non-numeric parameter path `{0}`")]
    InvalidPath(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
