use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error)]
pub enum SurfError {
    #[error("n = {0} is not a power of two (n >= 2 required)")]
    NotPowerOfTwo(usize),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("sample {index} is not a finite number")]
    NonFinite { index: usize },

    #[error("samples are not sorted ascending at position {index}")]
    Unsorted { index: usize },

    #[error("invalid index range [{a}, {b}) for n = {n}")]
    InvalidRange { a: usize, b: usize, n: usize },

    #[error("cumulative mass {num}/{den} does not land on a sample index for n = {n}")]
    NonIntegerBoundary { num: u64, den: u64, n: usize },

    #[error("invalid empirical distribution: {0}")]
    InvalidDistribution(String),

    #[error("mass totals differ: {left} vs {right}")]
    MassMismatch { left: String, right: String },

    #[error("integration bounds reversed: {a} > {b}")]
    ReversedBounds { a: f64, b: f64 },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("interval has zero length")]
    ZeroLength,

    #[error("degenerate node partition: {0}")]
    DegeneratePartition(String),

    #[error("singular linear system")]
    Singular,

    #[error("degree must be ≤ {max}, got {degree}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("piecewise estimate does not cover {0}")]
    CoverageGap(f64),

    #[error("invalid piecewise estimate: {0}")]
    InvalidEstimate(String),

    #[error("cell boundary does not align with the dyadic split at index {0}")]
    NonDyadicSplit(usize),

    #[error("invalid halt budget t = {t} for n = {n}: need a power of two with t < n")]
    InvalidHalt { t: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("unknown builtin spec {0:?}")]
    UnknownSpec(String),

    #[error("quadrature did not converge: value {value}, error bound {bound}")]
    Quadrature { value: f64, bound: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SurfError>;
