//! Floating-point sample type used by every real-valued stage of the pipeline.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar for luminance/chroma planes, block statistics and metrics.
///
/// Implemented for `f32` and `f64`. The `FromStr`/`Display` bounds exist so
/// selection plans can be serialized and read back losslessly.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn from_channel(c: u8) -> Self {
        Self::from_u8(c).expect("u8 representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
