//! Scalar abstractions.
//!
//! [`Scalar`] is the minimal ordered-field interface needed by the
//! probability containers and the simplex solver; it is implemented for
//! `f32`, `f64` and exact [`BigRational`]. [`Real`] adds the transcendental
//! functions required by information measures and is implemented for the
//! floating-point types only.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element usable in probability tables and linear programs.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding), e.g. rationals.
    const EXACT: bool;

    /// Tolerance used when comparing against zero inside the simplex method.
    fn pivot_tolerance() -> Self;

    /// Tolerance used when validating that masses sum to one.
    fn normalization_tolerance() -> Self;

    /// Convert from `f64`, panicking on NaN (used for literal constants only).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    /// `max(self, 0)`.
    fn positive_part(&self) -> Self {
        if *self > Self::zero() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn pivot_tolerance() -> Self {
        1e-11
    }
    fn normalization_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn pivot_tolerance() -> Self {
        1e-5
    }
    fn normalization_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn pivot_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn normalization_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
}

/// Floating-point scalar supporting logarithms and powers.
pub trait Real: Scalar + Float {
    /// `log(sum(exp(v)))`, ignoring `-inf` entries; `-inf` for empty input.
    fn log_sum_exp(values: &[Self]) -> Self {
        let mut m = Self::neg_infinity();
        for v in values {
            if *v > m {
                m = *v;
            }
        }
        if m == Self::neg_infinity() {
            return m;
        }
        if m == Self::infinity() {
            return m;
        }
        let mut s = Self::zero();
        for v in values {
            s = s + (*v - m).exp();
        }
        m + s.ln()
    }

    /// `x * ln(x)` with the convention `0 ln 0 = 0`.
    fn xlogx(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            self * self.ln()
        }
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Convenience: a rational from a numerator and denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
