//! Scalar abstraction: every distance, density and threshold in the crate is
//! generic over a floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Debug
        + Display
        + serde::Serialize
        + Send
        + Sync
        + 'static
{
}

/// Shorthand conversion from an f64 literal into the working scalar.
#[inline]
pub fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("finite f64 converts into the scalar type")
}

/// Exact-count conversion: counts stay well below 2^53 so the cast is lossless
/// for f64 and merely rounded for f32.
#[inline]
pub fn r_count<R: Real>(n: u64) -> R {
    R::from_u64(n).expect("u64 count converts into the scalar type")
}
