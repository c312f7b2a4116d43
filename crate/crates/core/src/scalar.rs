//! Floating-point scalar abstraction shared by every analytic routine.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst};
use rand::Rng;

/// Real scalar the analytic model and the sampler are generic over.
///
/// Implemented for `f32` and `f64`. All probabilities that can leave the
/// linear floating range are carried as natural logarithms.
pub trait Scalar:
    Float + FloatConst + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Relative tolerance used when two log-domain quantities are compared
    /// for equality.
    fn log_equality_tolerance() -> Self;

    /// Uniform draw from `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_u32(n: u32) -> Self {
        Self::from(n).expect("u32 representable in scalar type")
    }

    #[inline]
    fn from_u64(n: u64) -> Self {
        Self::from(n).expect("u64 representable in scalar type")
    }
}

impl Scalar for f64 {
    #[inline]
    fn log_equality_tolerance() -> Self {
        1e-12
    }

    #[inline]
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen::<f64>()
    }
}

impl Scalar for f32 {
    // 1e-12 is below f32 resolution; a few ulps instead.
    #[inline]
    fn log_equality_tolerance() -> Self {
        8.0 * f32::EPSILON
    }

    #[inline]
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen::<f32>()
    }
}

/// `2^k` as a scalar. Exact for every admissible level.
#[inline]
pub(crate) fn pow2<T: Scalar>(k: u32) -> T {
    T::from_u64(1u64 << k)
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum(exp(x_i)))` over a slice; `-inf` for an empty slice.
pub fn log_sum_exp<T: Scalar>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let sum = xs.iter().fold(T::zero(), |acc, &x| acc + (x - max).exp());
    max + sum.ln()
}

/// `ln(1 - exp(x))` for `x <= 0`, accurate near both ends.
pub fn log1m_exp<T: Scalar>(x: T) -> T {
    if x > -T::LN_2() {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}
