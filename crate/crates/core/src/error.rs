use thiserror::Error;

use crate::comodule::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("characteristic {p} exceeds the configured bound {max}")]
    PrimeOutOfRange { p: u32, max: u32 },
    #[error("operands live over different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("attempted to invert zero")]
    ZeroInverse,
    #[error("no value assigned to variable {0}")]
    MissingAssignment(String),
    #[error("variable {var} does not belong to {context}")]
    ForeignVariable { var: String, context: String },
    #[error("index ({i}, {j}) out of range for N = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not p-nilpotent")]
    NotNilpotent,
    #[error("symbolic nilpotent domain needs N <= p (got N = {n}, p = {p})")]
    SymbolicDomainTooLarge { n: usize, p: u32 },
    #[error("desk-scale guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("operation not supported for coalgebra {0}")]
    UnsupportedCoalgebra(String),
    #[error("invalid u-family: {0}")]
    InvalidFamily(String),
    #[error("not a comodule: {0}")]
    NotComodule(Violation),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid one-parameter subgroup: {0}")]
    InvalidSubgroup(String),
}
