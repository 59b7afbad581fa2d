use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrifError {
    #[error("word length must be between 1 and {max}, got {got}")]
    InvalidLength { got: usize, max: usize },

    #[error("value {value} does not fit in {length} ternary digits")]
    ValueOutOfRange { value: u64, length: usize },

    #[error("symbol {0} is not in {{0,1,2}}")]
    InvalidSymbol(u8),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("words passed to a triple test must be pairwise distinct")]
    NotDistinct,

    #[error("duplicate word {0} in code")]
    DuplicateWord(u32),

    #[error("minimum distance needs at least two words, code has {0}")]
    TooFewWords(usize),

    #[error("coordinate {coordinate} out of range for length {length}")]
    CoordinateOutOfRange { coordinate: usize, length: usize },

    #[error("residual subcodes need length at least 2")]
    ResidualOfLengthOne,

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("brute-force oracle limited to length {max}, got {got}")]
    OracleTooLarge { got: usize, max: usize },

    #[error("target cardinality {target} exceeds floor(3*{tau}/2) = {limit}")]
    TargetTooLarge {
        target: usize,
        tau: usize,
        limit: usize,
    },

    #[error("extension bases are limited to {max} words, got {got}")]
    BaseTooLarge { got: usize, max: usize },

    #[error("stage thresholds violate l_i >= ceil(2*l_(i+1)/3): {from} -> {to}")]
    InvalidThresholds { from: usize, to: usize },

    #[error("base code is not trifferent")]
    NotTrifferent,

    #[error("word is not a member of the code")]
    NotAMember,

    #[error("distance {d} out of range for length {n}")]
    DistanceOutOfRange { n: usize, d: usize },

    #[error("projection to the first {0} coordinates hits (1,...,1)")]
    ProjectionHitsAllOnes(usize),

    #[error("no value for T({0}) in the ledger")]
    MissingLedgerEntry(usize),

    #[error("census for length {0} not available")]
    CensusUnavailable(usize),

    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("dimension {got} exceeds the supported maximum {max}")]
    DimensionTooLarge { got: usize, max: usize },

    #[error("projective geometry needs dimension k >= 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dual distance parameter must be 2 or 3, got {0}")]
    InvalidDualDistance(usize),

    #[error("generator matrix has a zero column at position {0}")]
    ZeroColumn(usize),

    #[error("code is not minimal")]
    NotMinimal,

    #[error("weight enumerator has no nonzero weights")]
    EmptyEnumerator,

    #[error("point multiset is not strong blocking")]
    NotStrongBlocking,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T, E = TrifError> = std::result::Result<T, E>;

impl TrifError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        TrifError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
