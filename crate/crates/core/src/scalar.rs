use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real coordinate type the solver is generic over: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance for on-segment, collinearity and coincidence tests, in
    /// normalized domain units.
    fn geom_eps() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot
    /// represent at all, which never happens for the constants used here.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn geom_eps() -> f64 {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn geom_eps() -> f32 {
        1e-5
    }
}

/// Total order on non-NaN scalars; NaN compares equal so sorting never panics.
#[inline]
pub fn cmp_scalar<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Heap key ordered ascending by `(value, tie)` for use in a max-heap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MinKey<T: Scalar> {
    pub value: T,
    pub tie: usize,
}

impl<T: Scalar> Eq for MinKey<T> {}

impl<T: Scalar> Ord for MinKey<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(&other.value, &self.value).then_with(|| other.tie.cmp(&self.tie))
    }
}

impl<T: Scalar> PartialOrd for MinKey<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
