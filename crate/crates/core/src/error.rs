use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {r} lies outside the closed unit disk")]
    OutsideDisk { r: f64 },

    #[error("invalid Zernike index (n = {n}, m = {m}): need |m| <= n and n - m even")]
    InvalidIndex { n: i64, m: i64 },

    #[error("coefficient vector of length {len} is not a triangular number (N+1)(N+2)/2")]
    BadCoefficientLength { len: usize },

    #[error("coefficients are not conjugate-symmetric (max asymmetry {asymmetry:.3e})")]
    NotConjugateSymmetric { asymmetry: f64 },

    #[error("matrix is ill-conditioned: condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("rank deficient: found {found} independent rows, need {needed}")]
    RankDeficient { found: usize, needed: usize },

    #[error("expected {expected} parameter points, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("cannot select {requested} points from a set of {available}")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("duplicate point at index {index}")]
    DuplicatePoint { index: usize },

    #[error(
        "wavelet level {level} failed the independence gate (condition number {condition:.3e})"
    )]
    GateFailure { level: usize, condition: f64 },

    #[error("underdetermined fit: {samples} samples for {unknowns} unknowns")]
    Underdetermined { samples: usize, unknowns: usize },

    #[error("fits were computed on different sample sets")]
    MismatchedSamples,

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("degree {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
