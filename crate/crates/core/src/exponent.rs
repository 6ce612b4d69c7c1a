use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::specfun::ratio_to_f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("exponent {0} is negative")]
    Negative(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("exponent arithmetic overflowed")]
    Overflow,
}

/// A non-negative rational power of `t`, kept in lowest terms.
///
/// Also used for derivative and integral orders, which are rationals too.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub const ZERO: Exponent = Exponent(Ratio::new_raw(0, 1));
    pub const ONE: Exponent = Exponent(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self, ExponentError> {
        if denom == 0 {
            return Err(ExponentError::ZeroDenominator);
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn integer(n: u32) -> Self {
        Exponent(Ratio::from_integer(i64::from(n)))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self, ExponentError> {
        if r.is_negative() {
            return Err(ExponentError::Negative(r.to_string()));
        }
        Ok(Exponent(r))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(self) -> f64 {
        ratio_to_f64(self.0)
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn checked_add(self, other: Exponent) -> Result<Exponent, ExponentError> {
        self.0
            .checked_add(&other.0)
            .map(Exponent)
            .ok_or(ExponentError::Overflow)
    }

    /// `self - other`, failing when the result would be negative.
    pub fn checked_sub(self, other: Exponent) -> Result<Exponent, ExponentError> {
        let r = self.0.checked_sub(&other.0).ok_or(ExponentError::Overflow)?;
        Exponent::from_ratio(r)
    }
}

impl Default for Exponent {
    fn default() -> Self {
        Exponent::ZERO
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `"p/q"`, an integer, or a terminating decimal such as `"0.75"`
/// (converted exactly).
impl FromStr for Exponent {
    type Err = ExponentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_err = || ExponentError::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| parse_err())?;
            let d: i64 = d.trim().parse().map_err(|_| parse_err())?;
            return Exponent::new(n, d);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err());
            }
            let negative = whole.starts_with('-');
            let whole: i64 = if whole.is_empty() || whole == "-" {
                0
            } else {
                whole.parse::<i64>().map_err(|_| parse_err())?.abs()
            };
            let scale = 10_i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| parse_err())?;
            let numer = whole
                .checked_mul(scale)
                .and_then(|w| w.checked_add(frac))
                .ok_or(ExponentError::Overflow)?;
            return Exponent::new(if negative { -numer } else { numer }, scale);
        }
        let n: i64 = s.parse().map_err(|_| parse_err())?;
        Exponent::new(n, 1)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
