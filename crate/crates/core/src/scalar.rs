//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A tolerance stated for double precision, widened to a floor of a few
    /// thousand ulps so the same checks stay meaningful in single precision.
    #[inline]
    fn tol(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(4096.0))
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Levi-Civita symbol on 0-based indices.
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> i8 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// The unique `l` completing `(i, j, l)` to a permutation of `(0, 1, 2)`, with
/// its sign. `None` when `i == j`.
#[inline]
pub fn complete_triple(i: usize, j: usize) -> Option<(usize, i8)> {
    if i == j || i > 2 || j > 2 {
        return None;
    }
    let l = 3 - i - j;
    Some((l, levi_civita(i, j, l)))
}
