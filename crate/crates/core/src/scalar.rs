//! Floating-point abstraction so every routine works in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Scalar type used throughout the crate.
///
/// This bundles the numeric capabilities the algorithms actually rely on:
/// IEEE float semantics (`Float`), conversion from integer counts
/// (`FromPrimitive`), compound assignment, and iterator summation, plus the
/// marker traits needed to hand networks to parallel sweep workers.
/// Implemented for `f32` and `f64`; the crate root re-exports `f64` aliases
/// for the common case.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert an `f64` literal (tolerances, defaults). Panics on values that
    /// have no representation at all (NaN converts fine; only exotic cases
    /// like converting infinity into a type without one would fail, which
    /// cannot happen for `f32`/`f64`).
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal must be representable")
    }

    /// Convert a count into the scalar domain.
    fn from_usize_lossy(value: usize) -> Self {
        Self::from_usize(value).expect("count must be representable")
    }

    /// Widen to `f64` for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar must widen to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
        assert_eq!(f64::from_usize_lossy(140), 140.0);
        assert_eq!(0.25f32.to_f64_lossy(), 0.25);
    }
}
