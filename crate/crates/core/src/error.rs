use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("ideal is not proper or not coprime to the conductor: {0}")]
    NotProper(String),
    #[error("not coprime to the modulus: {0}")]
    NotCoprime(String),
    #[error("{n}-torsion is not rational over level {level}; minimal sufficient level: {minimal}")]
    TorsionUnavailable { n: u64, level: u8, minimal: String },
    #[error("point is not {0}-torsion")]
    NotTorsion(u64),
    #[error("invalid kernel: {0}")]
    BadKernel(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
