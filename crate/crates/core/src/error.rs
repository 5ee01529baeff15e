use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime set must not be empty")]
    EmptyPrimeSet,
    #[error("zero vector has no homogeneous height")]
    ZeroVector,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("forms are not equivalent over Z_{0}")]
    NotLocallyEquivalent(u64),
    #[error("forms are not rationally equivalent (certified at height cutoff {cutoff})")]
    NotRationallyEquivalent { cutoff: String },
    #[error("rational equivalence search inconclusive: height cutoff {cutoff} exhausted")]
    Inconclusive { cutoff: String },
    #[error("no representation of {value} found up to height {cutoff}")]
    NotFound { value: String, cutoff: String },
    #[error("p-adic precision insufficient at p = {prime}: {reason}")]
    InsufficientPrecision { prime: u64, reason: String },
    #[error("precision doubling limit reached without a verified result")]
    PrecisionExhausted,
    #[error("search arithmetic overflowed machine integers at height {0}")]
    SearchOverflow(u64),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
