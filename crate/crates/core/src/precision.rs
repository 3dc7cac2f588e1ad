//! Floating-point precision modes.
//!
//! Every numerical routine in this crate is generic over [`Scalar`], so a
//! whole pipeline can be run end to end in binary32 or binary64. `Single`
//! means every arithmetic operation, including the rounding of the input
//! matrix, happens in `f32`; no intermediate is ever widened to `f64`.

use std::fmt;

use num_traits::Float;

/// Arithmetic precision for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrecisionMode {
    /// binary32 end to end.
    Single,
    /// binary64 end to end.
    Double,
}

impl PrecisionMode {
    pub fn label(self) -> &'static str {
        match self {
            PrecisionMode::Single => "single",
            PrecisionMode::Double => "double",
        }
    }
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Floating-point element type the numerical kernels are generic over.
///
/// Implemented for `f32` and `f64` only; the associated [`PrecisionMode`]
/// tags results produced at that type.
pub trait Scalar: Float + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const MODE: PrecisionMode;

    /// Default tolerance for verification-style checks, relative to the
    /// max-norm of the operand.
    fn verification_tolerance() -> Self;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Convert a small nonnegative integer (dimensions, counters).
    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Scalar for f32 {
    const MODE: PrecisionMode = PrecisionMode::Single;

    fn verification_tolerance() -> Self {
        1e-4
    }

    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    const MODE: PrecisionMode = PrecisionMode::Double;

    fn verification_tolerance() -> Self {
        1e-10
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// Spacing between 1 and the next representable value (machine epsilon).
pub fn ulp_one<T: Scalar>() -> T {
    T::epsilon()
}

/// Threshold below which a rank-one update denominator is treated as
/// singular: `1e3 * ulp(1)`, scaled by the magnitude of the operand.
pub fn near_singular_threshold<T: Scalar>(scale: T) -> T {
    T::from_f64(1e3) * T::epsilon() * scale.abs().max(T::one())
}
