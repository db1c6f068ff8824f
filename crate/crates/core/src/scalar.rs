//! Scalar types for weights: `f64` for gamma-dependent quantities and
//! exact big rationals for everything pivot-like.

use core::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

pub type Rational = BigRational;

pub trait Weight: Clone + PartialOrd + Debug + Signed {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Weight for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Nearest fraction with denominator `den`.
pub fn round_to_denominator(x: f64, den: u64) -> Rational {
    let scaled = libm::round(x * den as f64);
    BigRational::new(BigInt::from(scaled as i128), BigInt::from(den))
}

/// `floor(x / step) * step` for positive `step`.
pub fn floor_to_multiple(x: &Rational, step: &Rational) -> Rational {
    (x / step).floor() * step
}

pub fn is_multiple_of(x: &Rational, step: &Rational) -> bool {
    (x / step).is_integer()
}

pub fn nonneg<T: Weight>(x: &T) -> bool {
    !x.is_negative()
}

pub fn zero<T: Weight>() -> T {
    T::zero()
}
