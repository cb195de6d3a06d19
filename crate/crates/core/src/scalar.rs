//! Scalar fields used by the polyhedral (exact-capable) code paths.
//!
//! Polyhedral norms and the simplex solver are written once over [`Scalar`]
//! and instantiated both for `f64` and for [`BigRational`].

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Ordered field with the operations needed by polyhedral norms and LP.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + Send + Sync + 'static
{
    /// Converts an `f64` parameter. For rationals this is the exact value of
    /// the shortest decimal string that round-trips to `x`.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Strictly positive, beyond the field's comparison tolerance.
    fn is_pos(&self) -> bool;

    /// Strictly negative, beyond the field's comparison tolerance.
    fn is_neg(&self) -> bool;

    fn is_exact() -> bool;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

const F64_EPS: f64 = 1e-11;

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }

    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        rational_from_f64(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_pos(&self) -> bool {
        self.is_positive()
    }

    fn is_neg(&self) -> bool {
        self.is_negative()
    }

    fn is_exact() -> bool {
        true
    }

    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Exact rational value of the shortest decimal representation of `x`.
///
/// `0.1` maps to `1/10`, not to the dyadic value stored in the float.
/// Panics on non-finite input.
pub fn rational_from_f64(x: f64) -> BigRational {
    assert!(x.is_finite(), "cannot convert non-finite {x} to a rational");
    parse_decimal(&format!("{x:e}")).expect("float formatting is a valid decimal")
}

/// Parses `[-]digits[.digits][e[-]digits]` or `p/q` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut num = BigInt::from_str(&digits).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
