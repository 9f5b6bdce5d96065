//! Exact rational arithmetic with a point at infinity.
//!
//! Everything downstream (continued fractions, Seifert coefficients,
//! surgery slopes) is built on these; there is no floating point anywhere
//! in the crate.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, stored reduced with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn int<T: Into<BigInt>>(n: T) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(numer: i64, denom: i64) -> Result<Self> {
        Self::new(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        Rational::new(numer, denom)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A rational together with the distinguished value `Infinity`.
///
/// Division rules: 1/Infinity = 0, 1/0 = Infinity, and c ± Infinity = Infinity
/// for finite c.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    Finite(Rational),
    Infinity,
}

impl ExtendedRational {
    pub fn int<T: Into<BigInt>>(n: T) -> Self {
        ExtendedRational::Finite(Rational::int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedRational::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            ExtendedRational::Infinity => None,
        }
    }

    /// 1/x with the extended rules.
    pub fn recip(&self) -> ExtendedRational {
        match self {
            ExtendedRational::Infinity => ExtendedRational::Finite(Rational::zero()),
            ExtendedRational::Finite(r) if r.is_zero() => ExtendedRational::Infinity,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(r.recip().expect("nonzero")),
        }
    }

    pub fn add_finite(&self, c: &Rational) -> ExtendedRational {
        match self {
            ExtendedRational::Infinity => ExtendedRational::Infinity,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(c + r),
        }
    }

    pub fn sub_from_finite(&self, c: &Rational) -> ExtendedRational {
        match self {
            ExtendedRational::Infinity => ExtendedRational::Infinity,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(c - r),
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(r) => write!(f, "{r}"),
            ExtendedRational::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "Infinity" || t == "∞" {
            Ok(ExtendedRational::Infinity)
        } else {
            Ok(ExtendedRational::Finite(t.parse()?))
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// The multiplicative inverse of `a` modulo `p`, normalized to `1..=p`.
///
/// The result equals `p` only when `p == 1`.
pub fn mod_inverse(a: i64, p: i64) -> Result<i64> {
    if p < 1 {
        return Err(Error::NotPositive(p.to_string()));
    }
    if p == 1 {
        return Ok(1);
    }
    let a_mod = a.rem_euclid(p);
    let ext = BigInt::from(a_mod).extended_gcd(&BigInt::from(p));
    if !ext.gcd.is_one() {
        return Err(Error::NotCoprime(a, p));
    }
    let inv = ext.x.mod_floor(&BigInt::from(p));
    let inv: i64 = i64::try_from(&inv).expect("inverse fits i64");
    Ok(if inv == 0 { p } else { inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_with_positive_denominator() {
        let r = Rational::ratio(-4, -6).unwrap();
        assert_eq!(r, Rational::ratio(2, 3).unwrap());
        assert!(r.denom().is_positive());
        let r = Rational::ratio(4, -6).unwrap();
        assert_eq!(r, Rational::ratio(-2, 3).unwrap());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Rational::ratio(1, 0).is_err());
    }

    #[test]
    fn display_and_parse() {
        let r: Rational = "98/3".parse().unwrap();
        assert_eq!(r.to_string(), "98/3");
        let r: Rational = "-7".parse().unwrap();
        assert_eq!(r, Rational::int(-7));
        let x: ExtendedRational = "inf".parse().unwrap();
        assert!(x.is_infinite());
    }

    #[test]
    fn extended_division_rules() {
        let inf = ExtendedRational::Infinity;
        assert_eq!(inf.recip(), ExtendedRational::int(0));
        assert_eq!(ExtendedRational::int(0).recip(), ExtendedRational::Infinity);
        assert!(inf.add_finite(&Rational::int(5)).is_infinite());
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(2, 3).unwrap(), 2);
        assert_eq!(mod_inverse(5, 7).unwrap(), 3);
        assert_eq!(mod_inverse(1, 11).unwrap(), 1);
        assert_eq!(mod_inverse(1, 1).unwrap(), 1);
        assert!(mod_inverse(2, 4).is_err());
    }
}
