//! Crate-wide error type.

/// Errors raised by validation, construction and numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least 2 states, got {m}")]
    TooSmall { m: usize },

    #[error("negative entry {value:e} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum} (must be 1 within {tolerance:e})")]
    RowSumOff {
        row: usize,
        sum: f64,
        tolerance: f64,
    },

    #[error("chain is reducible; states {unreachable:?} are cut off from state {witness}")]
    Reducible {
        /// States (zero-based) with no path to or from the witness state.
        unreachable: Vec<usize>,
        witness: usize,
    },

    #[error("perturbed row is not a probability row: {reason}")]
    ResultNotStochastic { reason: String },

    #[error("perturbation must have zero row sums, got {sum:e} in row {row}")]
    NonZeroRowSum { row: usize, sum: f64 },

    #[error("linear system is numerically singular (pivot {pivot:e} below {threshold:e})")]
    SingularSystem { pivot: f64, threshold: f64 },

    #[error("projection v'A_G e = {value:e} is too close to zero; choose another v")]
    DegenerateProjection { value: f64 },

    #[error("g-inverse does not satisfy Ge = ge (max deviation {deviation:e} over {tolerance:e})")]
    NotRowConstant { deviation: f64, tolerance: f64 },

    #[error("rank-one update denominator {denominator:e} is below the singularity threshold {threshold:e} at step {step}")]
    NearSingularUpdate {
        denominator: f64,
        threshold: f64,
        /// One-based perturbation step, 0 when not part of a sweep.
        step: usize,
    },

    #[error("inconsistent inputs: {reason}")]
    InconsistentInput { reason: String },

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix shapes differ: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("malformed matrix input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
