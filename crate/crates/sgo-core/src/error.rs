use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an exact zero")]
    ZeroDivisor,
    #[error("valuation undecidable within the precision band")]
    InsufficientPrecision,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not match the expected pattern: {0}")]
    PatternMismatch(String),
    #[error("invalid rank (M, N) = ({0}, {1}); need 0 < M < N")]
    InvalidRank(usize, usize),
    #[error("weights or roots belong to different ranks")]
    RankMismatch,
    #[error("weights are not comparable in the root order")]
    NotComparable,
    #[error("negative root coefficient")]
    NegativeCoefficient,
    #[error("malformed stratum sequences: {0}")]
    MalformedSequences(String),
    #[error("divisor invariant violated: {0}")]
    InvariantViolation(String),
    #[error("root vector is not supported on a single simple root")]
    MixedSupport,
    #[error("divisors share a point")]
    OverlappingSupport,
    #[error("orbit invariants are inconsistent: {0}")]
    InconsistentInvariants(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
