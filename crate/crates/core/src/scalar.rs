//! Numeric scalar abstraction for the metric layer.
//!
//! Every metric in this crate is a ratio of token counts, so the only
//! constructor a scalar needs is `from_ratio`. Floating point types are used
//! for everyday reporting; [`Exact`] (an arbitrary precision rational) lets
//! tests compare metric values with exact equality.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Arbitrary precision rational scalar.
pub type Exact = BigRational;

pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync {
    /// `num / den`. Callers guarantee `den > 0`.
    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_u64(value: u64) -> Self {
        Self::from_ratio(value, 1)
    }

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Harmonic mean of two fractions, zero when both are zero.
pub(crate) fn harmonic_mean<T: Scalar>(a: T, b: T) -> T {
    let sum = a.clone() + b.clone();
    if sum.is_zero() {
        return T::zero();
    }
    let two = T::one() + T::one();
    two * a * b / sum
}
