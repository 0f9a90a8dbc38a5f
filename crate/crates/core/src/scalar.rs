//! Numbers that are either exact rationals or binary floats.
//!
//! Structure-constant algebra (Casimir checks, subalgebra closure, chain
//! invariants) runs in whatever arithmetic the input used. Mixing the two
//! kinds in a binary operation yields a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as a number")]
pub struct ParseScalarError {
    pub input: String,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num/den` as an exact rational. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(v: f64) -> Self {
        Scalar::Float(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => *f == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(f) => *f > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(f) => *f < 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(f) => f.is_finite(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(f) => *f,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(f) => Scalar::Float(f.abs()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// The same value demoted to a float.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Converts a float to the rational whose shortest decimal
    /// representation it prints as, so `0.1` becomes `1/10`.
    pub fn to_exact(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(_) => Some(self.clone()),
            Scalar::Float(f) if f.is_finite() => parse_exact(&format!("{f:?}")).map(Scalar::Exact),
            Scalar::Float(_) => None,
        }
    }

    /// Parses `p/q`, integers and decimals. Decimals become floats unless
    /// `force_exact` is set, in which case they are read as exact decimals.
    pub fn parse(input: &str, force_exact: bool) -> Result<Scalar, ParseScalarError> {
        let s = input.trim();
        let err = || ParseScalarError {
            input: input.to_string(),
        };
        if s.is_empty() {
            return Err(err());
        }
        if s.contains('/') || is_integer_literal(s) || force_exact {
            return parse_exact(s).map(Scalar::Exact).ok_or_else(err);
        }
        let v: f64 = s.parse().map_err(|_| err())?;
        if !v.is_finite() {
            return Err(err());
        }
        Ok(Scalar::Float(v))
    }

    pub fn min<'a>(&'a self, other: &'a Scalar) -> &'a Scalar {
        if other.partial_cmp(self) == Some(Ordering::Less) {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Scalar) -> &'a Scalar {
        if other.partial_cmp(self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

fn is_integer_literal(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Exact parse of `p/q`, `p`, or a decimal with optional exponent.
fn parse_exact(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim())?;
        let den = parse_int(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator and denominator: scale down before dividing.
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::Exact(v)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(f) => Scalar::Float(-f),
        }
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, v| acc + v)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scalar::parse(s, false)
    }
}

/// Exact values serialize as strings (`"1/48"`), floats as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_integers_and_decimals() {
        assert_eq!(Scalar::parse("2/3", false).unwrap(), Scalar::ratio(2, 3));
        assert!(Scalar::parse("2/3", false).unwrap().is_exact());
        assert!(Scalar::parse("-7", false).unwrap().is_exact());
        let d = Scalar::parse("0.1", false).unwrap();
        assert!(!d.is_exact());
        let e = Scalar::parse("0.1", true).unwrap();
        assert_eq!(e.to_string(), "1/10");
        assert_eq!(Scalar::parse("2.5e-3", true).unwrap(), Scalar::ratio(1, 400));
        assert_eq!(Scalar::parse("1E2", true).unwrap(), Scalar::int(100));
        assert!(Scalar::parse("1/0", false).is_err());
        assert!(Scalar::parse("abc", false).is_err());
        assert!(Scalar::parse("", false).is_err());
        assert!(Scalar::parse("nan", false).is_err());
    }

    #[test]
    fn mixed_arithmetic_demotes_to_float() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::float(0.25);
        let c = &a + &b;
        assert!(!c.is_exact());
        assert_eq!(c.to_f64(), 0.75);
        let d = &a * &Scalar::ratio(2, 3);
        assert_eq!(d, Scalar::ratio(1, 3));
        assert!(d.is_exact());
    }

    #[test]
    fn float_to_exact_uses_shortest_decimal() {
        assert_eq!(Scalar::float(0.1).to_exact().unwrap(), Scalar::ratio(1, 10));
        assert_eq!(Scalar::float(3.0).to_exact().unwrap(), Scalar::int(3));
        assert!(Scalar::float(f64::INFINITY).to_exact().is_none());
    }

    #[test]
    fn display_and_serialize() {
        assert_eq!(Scalar::ratio(3, 20).to_string(), "3/20");
        assert_eq!(Scalar::int(4).to_string(), "4");
        assert_eq!(serde_json::to_string(&Scalar::ratio(1, 48)).unwrap(), "\"1/48\"");
        assert_eq!(serde_json::to_string(&Scalar::float(0.5)).unwrap(), "0.5");
    }

    #[test]
    fn ordering_across_kinds() {
        assert!(Scalar::ratio(1, 3) < Scalar::float(0.34));
        assert!(Scalar::ratio(1, 3) > Scalar::ratio(3, 10));
        assert_eq!(Scalar::ratio(1, 3).min(&Scalar::ratio(1, 4)), &Scalar::ratio(1, 4));
    }
}
