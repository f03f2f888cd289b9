//! Exact rational weights over arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalWeight(BigRational);

impl RationalWeight {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        // Ratio::new reduces and normalizes the sign; panics on a zero denominator.
        RationalWeight(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        RationalWeight(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        RationalWeight(BigRational::zero())
    }

    pub fn one() -> Self {
        RationalWeight(BigRational::one())
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(RationalWeight)
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

    pub fn abs(&self) -> Self {
        RationalWeight(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        RationalWeight(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        RationalWeight(num_traits::Pow::pow(&self.0, exp))
    }

    /// Nearest `f64`, rounded once from the exact value.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for RationalWeight {
    fn from(value: BigRational) -> Self {
        RationalWeight(value)
    }
}

impl From<i64> for RationalWeight {
    fn from(value: i64) -> Self {
        RationalWeight::from_integer(value)
    }
}

impl From<BigInt> for RationalWeight {
    fn from(value: BigInt) -> Self {
        RationalWeight::from_integer(value)
    }
}

impl fmt::Display for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RationalWeight {
    type Err = Error;

    /// Accepts `p` or `p/q` with integer `p`, `q` and `q != 0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::ParseRational(s.to_string());
        let s = s.trim();
        let (numer, denom) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let numer: BigInt = numer.parse().map_err(|_| bad())?;
        let denom: BigInt = denom.parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(RationalWeight::new(numer, denom))
    }
}

impl Serialize for RationalWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for RationalWeight {
            type Output = RationalWeight;
            fn $method(self, rhs: RationalWeight) -> RationalWeight {
                RationalWeight($trait::$method(self.0, rhs.0))
            }
        }

        impl<'a> $trait<&'a RationalWeight> for &'a RationalWeight {
            type Output = RationalWeight;
            fn $method(self, rhs: &'a RationalWeight) -> RationalWeight {
                RationalWeight($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for RationalWeight {
    type Output = RationalWeight;
    fn neg(self) -> RationalWeight {
        RationalWeight(-self.0)
    }
}

impl Neg for &RationalWeight {
    type Output = RationalWeight;
    fn neg(self) -> RationalWeight {
        RationalWeight(-&self.0)
    }
}

impl std::iter::Sum for RationalWeight {
    fn sum<I: Iterator<Item = RationalWeight>>(iter: I) -> Self {
        iter.fold(RationalWeight::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a RationalWeight> for RationalWeight {
    fn sum<I: Iterator<Item = &'a RationalWeight>>(iter: I) -> Self {
        iter.fold(RationalWeight::zero(), |acc, x| &acc + x)
    }
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Harmonic number `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> RationalWeight {
    (1..=n as i64).map(|m| RationalWeight::new(1, m)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_reduced_with_positive_denominator() {
        let w = RationalWeight::new(6, -4);
        assert_eq!(w.numer(), &BigInt::from(-3));
        assert_eq!(w.denom(), &BigInt::from(2));
        assert_eq!(w.to_string(), "-3/2");
    }

    #[test]
    fn integers_print_without_denominator() {
        assert_eq!(RationalWeight::new(4, 2).to_string(), "2");
        assert_eq!(RationalWeight::zero().to_string(), "0");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!("-3/2".parse::<RationalWeight>().unwrap(), RationalWeight::new(-3, 2));
        assert_eq!("7".parse::<RationalWeight>().unwrap(), RationalWeight::from(7));
        assert!("1/0".parse::<RationalWeight>().is_err());
        assert!("1.5".parse::<RationalWeight>().is_err());
        assert!("".parse::<RationalWeight>().is_err());
    }

    #[test]
    fn float_conversion_rounds_to_nearest() {
        assert_eq!(RationalWeight::new(1, 3).to_f64(), 1.0 / 3.0);
        assert_eq!(RationalWeight::new(-1, 24).to_f64(), -1.0 / 24.0);
        assert_eq!(RationalWeight::new(9, 8).to_f64(), 1.125);
        let huge = RationalWeight::new(factorial(40) + 1, factorial(40));
        assert_eq!(huge.to_f64(), 1.0);
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.1, -3.75, 1e-300, 6.02e23] {
            assert_eq!(RationalWeight::from_f64(x).unwrap().to_f64(), x);
        }
        assert!(RationalWeight::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(20), BigInt::from(2_432_902_008_176_640_000u64));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(64, 32), BigInt::from(1_832_624_140_942_590_534u64));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(harmonic(3), RationalWeight::new(11, 6));
        assert_eq!(harmonic(0), RationalWeight::zero());
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let json = serde_json::to_string(&RationalWeight::new(-1, 6)).unwrap();
        assert_eq!(json, "\"-1/6\"");
        let back: RationalWeight = serde_json::from_str(&json).unwrap();
        assert_eq!(back, RationalWeight::new(-1, 6));
    }
}
