use std::path::PathBuf;

use thiserror::Error;

use crate::family::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{d} is not a quadratic nonresidue modulo {q}")]
    NotNonresidue { d: i64, q: u64 },
    #[error("no element of order {order} in a field of size {q}")]
    NoElementOfOrder { order: u64, q: u64 },
    #[error("field context does not match the ring: {0}")]
    ContextMismatch(String),
    #[error("ring elements have mismatched shapes: {0}")]
    RingMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid family parameters: {}", join_violations(.0))]
    InvalidFamily(Vec<Violation>),
    #[error("squarefreeness of {0} could not be decided")]
    Undecided(u64),
    #[error("instance too large for exact evaluation: {0}")]
    TooLarge(String),
    #[error("only {got} samples, attack needs at least {need}")]
    NotEnoughSamples { got: usize, need: usize },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
