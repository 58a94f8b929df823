use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} unsupported (only 1 and 2 are)")]
    UnsupportedDimension(usize),

    #[error("coordinate or parameter not finite: {0}")]
    NotFinite(&'static str),

    #[error("invalid box: lo > hi on axis {axis} ({lo} > {hi})")]
    InvalidBox { axis: usize, lo: f64, hi: f64 },

    #[error("contraction ratio {0} outside (0, 1)")]
    RatioOutOfRange(f64),

    #[error("cantor gap parameter alpha = {0} outside (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("iterated function system needs at least one map")]
    EmptyMapList,

    #[error("map {map_index} does not send the seed box into itself")]
    SeedNotInvariant { map_index: usize },

    #[error("refinement would produce {requested} cells, above the cap of {cap}")]
    CellCountExceeded { requested: u128, cap: u64 },

    #[error("map {map_index} is not axis-aligned; only box-preserving maps are supported here")]
    NonAxisAlignedMap { map_index: usize },

    #[error("system is not interior-disjoint on its seed box: {0}")]
    NotInteriorDisjoint(String),

    #[error("open set condition candidate box must be nondegenerate")]
    DegenerateCandidate,

    #[error("exponent s = {0} must be nonnegative")]
    NegativeExponent(f64),

    #[error("invalid cover: {0}")]
    InvalidCover(&'static str),

    #[error("cover element {index} is already a ball")]
    ElementAlreadyBall { index: usize },

    #[error("invalid depth list: {0}")]
    InvalidDepths(String),

    #[error("invalid scale list: {0}")]
    InvalidScales(String),

    #[error("degenerate regression: all box counts equal, resolution insufficient")]
    DegenerateRegression,

    #[error("point list is empty")]
    EmptyPoints,

    #[error("invalid sampling parameters: {0}")]
    InvalidSampling(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
