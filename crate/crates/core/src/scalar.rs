//! Scalar abstraction shared by every grid computation.
//!
//! Probabilities, likelihoods and grid coordinates are all carried by a
//! single scalar type `S`. Floating point types give fast approximate
//! arithmetic; [`Rational`] and [`BigRational`] give exact arithmetic for the
//! places where ties and proportionality must be decided without rounding
//! (inference-base relations, the word model, counting examples).

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Exact rational with 64-bit numerator and denominator.
pub type Rational = Ratio<i64>;

/// Exact rational with arbitrary precision.
pub type BigRational = Ratio<BigInt>;

pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + ToPrimitive + Send + Sync + 'static {
    /// True for types whose arithmetic is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    /// Lossy conversion from `f64`; `None` for non-finite input.
    fn from_f64_lossy(x: f64) -> Option<Self>;

    /// Absolute tolerance for probability comparisons (zero for exact types).
    fn tolerance() -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num, den))
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= *tol
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(r: &Rational) -> Self {
                (*r.numer() as f64 / *r.denom() as f64) as $t
            }

            fn from_f64_lossy(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }

            fn tolerance() -> Self {
                $tol
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
        }
    };
}

float_scalar!(f64, 1e-10);
float_scalar!(f32, 1e-5);

/// Floating point scalars. Transcendental work (normal densities, CDFs,
/// simulation) is evaluated in `f64` and converted back.
pub trait FloatScalar: Scalar + Copy {
    fn from_f64(x: f64) -> Self;
}

impl FloatScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl FloatScalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        *r
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        Ratio::approximate_float(x)
    }

    fn tolerance() -> Self {
        Self::zero()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        Ratio::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        Ratio::from_float(x)
    }

    fn tolerance() -> Self {
        Self::zero()
    }
}

/// Sum of a slice of scalars, accumulated left to right.
pub fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, v| acc + v.clone())
}

/// Parse `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 17 {
            return None;
        }
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let frac_val: i64 = frac.parse().ok()?;
        let magnitude = int_part.abs().checked_mul(scale)?.checked_add(frac_val)?;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(numer, scale));
    }
    text.parse::<i64>().ok().map(Rational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_integer() {
        assert_eq!(parse_rational("3/4"), Some(Rational::new(3, 4)));
        assert_eq!(parse_rational("0.01"), Some(Rational::new(1, 100)));
        assert_eq!(parse_rational("-1.25"), Some(Rational::new(-5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(Rational::new(-1, 2)));
        assert_eq!(parse_rational("7"), Some(Rational::from_integer(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn float_conversion_from_rational() {
        assert_eq!(f64::ratio(1, 4), 0.25);
        assert_eq!(Rational::ratio(2, 4), Rational::new(1, 2));
        assert_eq!(BigRational::ratio(1, 3).as_f64(), 1.0 / 3.0);
    }
}
