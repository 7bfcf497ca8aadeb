//! Scalar abstraction shared by the problem model, the solvers and the
//! geometry code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as a coordinate and cost type: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance for comparing two solution costs.
    const REL_TOL: Self;
    /// Relative threshold below which a move delta is not counted as an
    /// improvement. Must sit well above the rounding noise of a delta.
    const IMPROVEMENT_EPS: Self;

    /// Lossy conversion from `f64` (exact for `f64`).
    fn of(value: f64) -> Self;

    fn as_f64(self) -> f64;

    fn of_usize(value: usize) -> Self {
        Self::of(value as f64)
    }
}

impl Scalar for f64 {
    const REL_TOL: Self = 1e-9;
    const IMPROVEMENT_EPS: Self = 1e-12;

    #[inline]
    fn of(value: f64) -> Self {
        value
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const REL_TOL: Self = 1e-5;
    const IMPROVEMENT_EPS: Self = 1e-6;

    #[inline]
    fn of(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// `a` and `b` agree within the scalar's relative tolerance.
pub fn approx_eq<T: Scalar>(a: T, b: T) -> bool {
    let scale = a.abs().max(b.abs()).max(T::one());
    (a - b).abs() <= T::REL_TOL * scale
}

/// Smallest decrease of `cost` that counts as an improvement.
pub(crate) fn improvement_threshold<T: Scalar>(cost: T) -> T {
    (cost.abs() * T::IMPROVEMENT_EPS).max(T::min_positive_value())
}
