//! Scalar abstraction for the numeric kernels.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances and literals throughout the
/// crate are written as `f64` constants and converted with [`Scalar::c`].
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts a finite `f64` constant into `Self`.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_conversion_round_trips() {
        assert_eq!(f64::c(1e-8), 1e-8);
        assert_eq!(f32::c(0.5), 0.5f32);
        assert_eq!((2.0f64).as_f64(), 2.0);
    }

    #[test]
    fn works_for_both_widths() {
        fn norm<F: Scalar>(xs: &[F]) -> F {
            xs.iter().map(|x| *x * *x).sum::<F>().sqrt()
        }
        assert_eq!(norm(&[3.0f64, 4.0]), 5.0);
        assert_eq!(norm(&[3.0f32, 4.0]), 5.0);
    }
}
