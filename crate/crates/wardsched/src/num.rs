//! Scalar abstraction for the numeric core.
//!
//! Constraint algebra, the simplex, cost evaluation and the sampler's
//! policy math are written against [`Scalar`] rather than a concrete
//! float, so the whole numeric stack can be instantiated at `f32` or
//! `f64`. The shipped tools use the `f64` aliases from the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable throughout the numeric core.
///
/// The bound set is deliberately small: IEEE float semantics from
/// `num_traits::Float`, lossless construction from small integers and
/// literals via `FromPrimitive`, and the assign-ops the inner loops use.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion to `f64`, used only at reporting boundaries.
    fn to_f64(self) -> f64;

    /// Conversion from `f64` constants baked into the algorithms.
    fn from_f64_const(v: f64) -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn from_f64_const(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn from_f64_const(v: f64) -> Self {
        v
    }
}

/// Total order wrapper for scalars, used where deterministic ordering is
/// required (priority queues, tie-breaking). NaNs sort last; the solver
/// never produces them in ordering positions, but the order must still be
/// total for `BinaryHeap` correctness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalOrd<T>(pub T);

impl<T: Scalar> Eq for TotalOrd<T> {}

impl<T: Scalar> PartialOrd for TotalOrd<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for TotalOrd<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).unwrap_or_else(|| {
            // Fall back to NaN-last ordering.
            match (self.0.is_nan(), other.0.is_nan()) {
                (true, true) => std::cmp::Ordering::Equal,
                (true, false) => std::cmp::Ordering::Greater,
                (false, true) => std::cmp::Ordering::Less,
                (false, false) => std::cmp::Ordering::Equal,
            }
        })
    }
}

/// Round half away from zero is deliberately *not* what demand rounding
/// uses; every count in the crate rounds half **up** (toward positive
/// infinity), so `0.5 -> 1` and `-0.5 -> 0`.
#[inline]
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}
