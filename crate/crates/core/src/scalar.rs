//! Floating-point scalar abstraction used throughout the crate.
//!
//! All numeric kernels are generic over [`Scalar`] so the same code runs in
//! `f32` and `f64`. The crate root exposes `f64` aliases for the common case.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to scalar")
    }

    /// Converts a count or index into this scalar type.
    fn from_usize_lossy(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize converts to scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Tolerance constant scaled so it stays meaningful in `f32` as well.
///
/// The crate's tolerance constants are stated for double precision; in
/// narrower types they fall below machine epsilon, so the effective
/// tolerance is floored at a small multiple of epsilon.
pub(crate) fn scaled_tol<T: Scalar>(base: f64) -> T {
    let four = T::from_f64_lossy(4.0);
    T::from_f64_lossy(base).max(T::epsilon() * four)
}
