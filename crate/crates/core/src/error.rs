use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("rank must be positive")]
    ZeroRank,

    #[error("matrix index ({i},{j}) out of range for rank {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("vector length {len} does not match rank {n}")]
    LengthMismatch { len: usize, n: usize },

    #[error("operator is not in D^1: order-1 coefficient is not a scalar multiple of the identity")]
    NotFirstOrderScalar,

    #[error("window [{lo}, {hi}] does not contain the required range [{need_lo}, {need_hi}]")]
    WindowTooSmall {
        lo: i64,
        hi: i64,
        need_lo: i64,
        need_hi: i64,
    },

    #[error("cocycle kind {kind} requires {what}")]
    KindMismatch { kind: String, what: String },

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("cannot parse Laurent polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
