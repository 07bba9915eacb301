use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the all-ones word is not in the base code")]
    AllOnesNotInCode,
    #[error("generator has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("base code dimension {k} is outside the supported range 2..={max}")]
    UnsupportedDimension { k: usize, max: usize },
    #[error("invalid order r={r} for m={m}")]
    InvalidOrder { r: usize, m: usize },
    #[error("block length {len} exceeds the limit {limit}")]
    TooLong { len: usize, limit: usize },
    #[error("empty codebook")]
    EmptyCodebook,
    #[error("word is not a codeword")]
    NotACodeword,
    #[error("minimum-weight enumeration needs n != 2d (n={n}, d={d})")]
    MinWeightUnavailable { n: usize, d: usize },
    #[error("invalid projection: {0}")]
    InvalidProjection(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
