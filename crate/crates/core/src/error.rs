use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("division by zero in GF({0})")]
    DivideByZero(u64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("invalid partition s1 = {s1} for k = {k} (need 1 <= s1 <= k-1)")]
    BadPartition { s1: usize, k: usize },

    #[error("n = {n} exceeds the enumeration cap {cap}; pass force to override")]
    TooLarge { n: usize, cap: usize },

    #[error("block length {m} exceeds field size {q}")]
    FieldTooSmall { m: usize, q: u64 },

    #[error("invalid allocation n1 = {n1}, n2 = {n2} for s1 = {s1}, s2 = {s2}")]
    BadAllocation {
        n1: usize,
        n2: usize,
        s1: usize,
        s2: usize,
    },

    #[error("codes cannot be combined: {0}")]
    Mismatch(String),

    #[error("bad asymptotic target: {0}")]
    BadTarget(String),

    #[error("trial {trial} exceeded {cap} draws")]
    TrialOverflow { trial: u64, cap: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
