use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix order must be at least 1")]
    EmptyMatrix,
    #[error("expected {expected} entries for order {order}, got {got}")]
    ShapeMismatch { order: usize, expected: usize, got: usize },
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    Asymmetric { i: usize, j: usize, gap: f64 },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("exponent must be a finite non-negative number, got {0}")]
    BadAlpha(f64),
    #[error("entry ({i}, {j}) = {value} is negative; use abs_power for signed matrices")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("index set {indices:?} is invalid for a matrix of order {order}")]
    IndexOutOfRange { indices: Vec<usize>, order: usize },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("x values must be pairwise distinct (x[{0}] == x[{1}])")]
    DuplicateX(usize, usize),
    #[error("x values must be strictly positive (x[{index}] = {value})")]
    NonPositiveX { index: usize, value: f64 },
    #[error("k = {k} is out of range for order {n}")]
    BadK { n: usize, k: usize },
    #[error("order {0} is not allowed here")]
    BadOrder(usize),
    #[error("perturbation must be a finite non-negative number, got {0}")]
    BadEpsilon(f64),
    #[error("family spec is incomplete: {0}")]
    IncompleteSpec(&'static str),
    #[error("cannot parse number {0:?}")]
    BadNumber(String),

    #[error("extended precision is disabled")]
    OracleUnavailable,
    #[error("the extended-precision referee needs a closed-form family, not {0}")]
    UnsupportedFamily(&'static str),
    #[error("requested {0} digits; at least 50 are required")]
    TooFewDigits(usize),
    #[error("signs at {lo} and {hi} are not strictly opposite")]
    SameSign { lo: String, hi: String },

    #[error("NOT_PSD sample at alpha = {alpha} lies inside component [{lo}, {hi}]")]
    InconsistentSamples { alpha: f64, lo: f64, hi: f64 },
    #[error("no perturbation size on the ladder certified every clause")]
    EpsilonLadderExhausted { last: Box<crate::verify::VerificationRecord> },
    #[error("baseline sign pattern mismatch at alpha = {alpha}: expected {expected}, got {got}")]
    BaselineMismatch { alpha: f64, expected: &'static str, got: &'static str },
    #[error("driver parameters out of range: {0}")]
    BadParameters(String),
    #[error("bad scan window: {0}")]
    BadWindow(String),

    #[error("submatrix of order {0} exceeds the expansion limit of 7")]
    OrderTooLarge(usize),
    #[error("zero entry at ({i}, {j}) cannot be expanded")]
    ZeroEntry { i: usize, j: usize },

    #[error("malformed matrix file: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
