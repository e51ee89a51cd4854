//! Exact rational quantities (credit hours, exam scores, person-years, money).
//!
//! Values serialize as plain JSON numbers whenever they have a terminating
//! decimal expansion and as `"p/q"` strings otherwise. Decimal input is
//! parsed from its shortest textual form, so `3.5` becomes exactly `7/2`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational number: {0:?}")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Smallest integer not less than `self`.
    pub fn ceil(&self) -> i64 {
        *self.0.ceil().numer()
    }

    pub fn floor(&self) -> i64 {
        *self.0.floor().numer()
    }

    /// Nearest integer, ties away from zero.
    pub fn round(&self) -> i64 {
        *self.0.round().numer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn checked_mul(&self, other: &Rational) -> Option<Rational> {
        self.0.checked_mul(&other.0).map(Rational)
    }

    pub fn checked_add(&self, other: &Rational) -> Option<Rational> {
        self.0.checked_add(&other.0).map(Rational)
    }

    /// Decimal digits if the expansion terminates.
    fn decimal_string(&self) -> Option<String> {
        let mut denom = self.denom();
        let mut scale = 0u32;
        while denom % 10 == 0 {
            denom /= 10;
            scale += 1;
        }
        // Strip factors of 2 and 5 to see whether the expansion terminates.
        let mut rest = denom;
        let mut twos = 0u32;
        let mut fives = 0u32;
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        if rest != 1 {
            return None;
        }
        let extra = twos.max(fives);
        let digits = scale + extra;
        let factor = 10i128.checked_pow(digits)?;
        let scaled = (self.numer() as i128).checked_mul(factor)? / self.denom() as i128;
        if digits == 0 {
            return Some(scaled.to_string());
        }
        let negative = scaled < 0;
        let abs = scaled.unsigned_abs().to_string();
        let width = digits as usize + 1;
        let padded = format!("{abs:0>width$}");
        let (int_part, frac_part) = padded.split_at(padded.len() - digits as usize);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if negative { "-" } else { "" };
        if frac_part.is_empty() {
            Some(format!("{sign}{int_part}"))
        } else {
            Some(format!("{sign}{int_part}.{frac_part}"))
        }
    }

    fn parse_decimal(text: &str) -> Option<Rational> {
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
        let denom = 10i64.checked_pow(frac_part.len() as u32)?;
        let numer = if negative { -numer } else { numer };
        Some(Rational::new(numer, denom))
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ParseRationalError(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Rational::new(n, d));
        }
        Rational::parse_decimal(s).ok_or_else(err)
    }
}

impl TryFrom<f64> for Rational {
    type Error = ParseRationalError;

    /// Goes through the shortest round-trip decimal form of the float.
    fn try_from(value: f64) -> Result<Self, Self::Error> {
        if !value.is_finite() {
            return Err(ParseRationalError(value.to_string()));
        }
        value.to_string().parse()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::integer(n as i64)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_string() {
            Some(s) => f.pad(&s),
            None => f.pad(&format!("{}/{}", self.numer(), self.denom())),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $assign_trait for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                self.0 = self.0.$method(rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            return serializer.serialize_i64(self.numer());
        }
        match self.decimal_string() {
            Some(s) => match s.parse::<f64>() {
                // Only emit a float when it prints back to the same digits.
                Ok(f) if f.to_string() == s => serializer.serialize_f64(f),
                _ => serializer.serialize_str(&s),
            },
            None => serializer.serialize_str(&format!("{}/{}", self.numer(), self.denom())),
        }
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        i64::try_from(v)
            .map(Rational::integer)
            .map_err(|_| E::custom("integer out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
        Rational::try_from(v).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Least common multiple of the denominators, used to move a set of
/// quantities onto a common integer grid.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, v| acc.lcm(&v.denom()))
}

/// Scales `value` onto the integer grid with the given denominator.
pub fn to_grid(value: Rational, grid: i64) -> i64 {
    let scaled = value * Rational::integer(grid);
    debug_assert!(scaled.is_integer());
    scaled.numer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!("3.5".parse::<Rational>().unwrap(), Rational::new(7, 2));
        assert_eq!("0.35".parse::<Rational>().unwrap(), Rational::new(7, 20));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), Rational::new(-5, 4));
        assert_eq!("2/6".parse::<Rational>().unwrap(), Rational::new(1, 3));
        assert!("x".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert_eq!(Rational::try_from(0.11).unwrap(), Rational::new(11, 100));
    }

    #[test]
    fn displays_terminating_and_repeating() {
        assert_eq!(Rational::new(15, 4).to_string(), "3.75");
        assert_eq!(Rational::new(45, 2).to_string(), "22.5");
        assert_eq!(Rational::integer(3).to_string(), "3");
        assert_eq!(Rational::new(-1, 8).to_string(), "-0.125");
        assert_eq!(Rational::new(1, 3).to_string(), "1/3");
    }

    #[test]
    fn json_forms() {
        let v: Vec<Rational> = serde_json::from_str(r#"[3, 3.5, "1/3", "0.1"]"#).unwrap();
        assert_eq!(
            v,
            vec![
                Rational::integer(3),
                Rational::new(7, 2),
                Rational::new(1, 3),
                Rational::new(1, 10)
            ]
        );
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[3,3.5,"1/3",0.1]"#);
    }

    #[test]
    fn rounding() {
        assert_eq!(Rational::new(7, 2).ceil(), 4);
        assert_eq!(Rational::new(7, 2).floor(), 3);
        assert_eq!(Rational::new(5, 2).round(), 3);
        assert_eq!(Rational::new(-5, 2).round(), -3);
    }

    proptest! {
        #[test]
        fn json_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..2_000) {
            let r = Rational::new(n, d);
            let text = serde_json::to_string(&r).unwrap();
            let back: Rational = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
