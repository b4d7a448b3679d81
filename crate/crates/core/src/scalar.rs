//! Numeric abstractions shared by the interval algebra and the scorers.

use std::fmt::Debug;

use num_rational::Ratio;

/// An ordered number usable as an interval endpoint.
///
/// Timestamps use `i64` seconds; the algebra tests sample `Ratio<i64>` and
/// `f64` endpoints through the same code path.
pub trait Scalar: num_traits::Num + PartialOrd + Copy + Debug {}

impl<T: num_traits::Num + PartialOrd + Copy + Debug> Scalar for T {}

/// A field in which precision, recall and F1 are computed.
pub trait Score: Scalar {
    fn from_count(n: u64) -> Self;
    fn to_f64(self) -> f64;
}

impl Score for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Score for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Score for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count exceeds i64"))
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
