use thiserror::Error;

use crate::checks::CheckReport;
use crate::recognize::Rejection;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed poset: {0}")]
    MalformedPoset(String),

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("cannot parse product type {input:?}: {reason}")]
    TypeParse { input: String, reason: String },

    #[error("search too large: {faces} faces exceeds the bound of {bound}")]
    SearchTooLarge { faces: usize, bound: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector has no gcd")]
    ZeroVector,

    #[error("malformed characteristic function: {0}")]
    MalformedCharFun(String),

    #[error("characteristic function is not valid at every vertex")]
    InvalidCharFun(CheckReport),

    #[error("poset not recognized: {0}")]
    Unrecognized(Rejection),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("malformed shelling certificate: {0}")]
    MalformedCertificate(String),

    #[error("h-vector has a negative coefficient h_{index} = {value}: not a valid orbit-space poset for this formula")]
    NegativeHVector { index: usize, value: i128 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
