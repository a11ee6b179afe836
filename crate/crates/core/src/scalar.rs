//! Scalar bounds shared by the Grassmann arithmetic and the integrators.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num};

/// Coefficient ring of a Grassmann algebra: any signed numeric type,
/// including exact rationals.
pub trait Scalar: Clone + PartialEq + Debug + Num + Neg<Output = Self> {}

impl<T> Scalar for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> {}

/// Floating-point scalars used for evaluation and integration (f32 or f64).
pub trait Real: Scalar + Float + FromPrimitive + Display + Copy + Send + Sync + 'static {}

impl<T> Real for T where T: Scalar + Float + FromPrimitive + Display + Copy + Send + Sync + 'static {}

/// Converts an `f64` literal into `T`.
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).unwrap_or_else(T::nan)
}
