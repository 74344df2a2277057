use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed token `{0}` (expected a<k> or A<k>)")]
    MalformedToken(String),

    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("chains belong to different quotient specs")]
    SpecMismatch,

    #[error("equation needs at least one constant")]
    EmptyEquation,

    #[error("certificate has {got} entries, equation has {expected} constants")]
    LengthMismatch { expected: usize, got: usize },

    #[error("sum of squares {0} is not a perfect square")]
    NotPerfectSquare(u64),

    #[error("square sides must be positive")]
    InvalidSide,

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
