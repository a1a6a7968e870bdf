//! Exact rational quantities for dimension locations and line coefficients.
//!
//! Locations are read from JSON numbers by parsing their decimal text, so a
//! value such as `13.5` or `0.1` is held exactly. Values that have no finite
//! decimal form are written back as `"p/q"` strings.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Magnitude(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a number: {0:?}")]
pub struct ParseMagnitudeError(pub String);

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude(BigRational::zero())
    }

    pub fn one() -> Self {
        Magnitude(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Magnitude(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Magnitude(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Magnitude(self.0.abs())
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Division; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Magnitude) -> Option<Magnitude> {
        if rhs.is_zero() {
            None
        } else {
            Some(Magnitude(&self.0 / &rhs.0))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion from a finite float (every finite f64 is a dyadic rational).
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Magnitude)
    }

    /// Parses decimal text (`12`, `-3.25`, `1e3`, `2.5E-1`) or a `p/q` fraction.
    pub fn parse(text: &str) -> Result<Self, ParseMagnitudeError> {
        let err = || ParseMagnitudeError(text.to_string());
        let t = text.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Magnitude(BigRational::new(p, q)));
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = all_digits.parse().map_err(|_| err())?;
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(numer * num::pow(ten, scale as usize))
        } else {
            BigRational::new(numer, num::pow(ten, (-scale) as usize))
        };
        Ok(Magnitude(value))
    }

    /// `Some(f)` when `f` prints as decimal text that parses back to exactly `self`.
    fn as_round_trip_f64(&self) -> Option<f64> {
        let f = self.to_f64();
        if !f.is_finite() {
            return None;
        }
        let text = serde_json::Number::from_f64(f)?.to_string();
        (Magnitude::parse(&text).ok()? == *self).then_some(f)
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else if let Some(v) = self.as_round_trip_f64() {
            write!(f, "{v}")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Magnitude {
    type Err = ParseMagnitudeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Magnitude::parse(s)
    }
}

impl From<i64> for Magnitude {
    fn from(n: i64) -> Self {
        Magnitude::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Magnitude> for &Magnitude {
            type Output = Magnitude;
            fn $method(self, rhs: &Magnitude) -> Magnitude {
                Magnitude($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Magnitude> for Magnitude {
            type Output = Magnitude;
            fn $method(self, rhs: Magnitude) -> Magnitude {
                Magnitude($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Magnitude {
    type Output = Magnitude;
    fn neg(self) -> Magnitude {
        Magnitude(-self.0)
    }
}

impl Neg for &Magnitude {
    type Output = Magnitude;
    fn neg(self) -> Magnitude {
        Magnitude(-&self.0)
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(n) = self.0.numer().to_i64() {
                return serializer.serialize_i64(n);
            }
        }
        match self.as_round_trip_f64() {
            Some(f) => serializer.serialize_f64(f),
            None => serializer.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom())),
        }
    }
}

struct MagnitudeVisitor;

impl Visitor<'_> for MagnitudeVisitor {
    type Value = Magnitude;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a \"p/q\" fraction string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Magnitude, E> {
        Ok(Magnitude::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Magnitude, E> {
        Ok(Magnitude(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Magnitude, E> {
        // Read the shortest decimal form so that 0.1 means one tenth.
        let text = serde_json::Number::from_f64(v).ok_or_else(|| E::custom("non-finite number"))?.to_string();
        Magnitude::parse(&text).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Magnitude, E> {
        Magnitude::parse(v).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Magnitude {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(MagnitudeVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(Magnitude::parse("13.5").unwrap(), Magnitude::ratio(27, 2));
        assert_eq!(Magnitude::parse("0.1").unwrap(), Magnitude::ratio(1, 10));
        assert_eq!(Magnitude::parse("-28").unwrap(), Magnitude::from_integer(-28));
        assert_eq!(Magnitude::parse("2.5e-1").unwrap(), Magnitude::ratio(1, 4));
        assert_eq!(Magnitude::parse("1E3").unwrap(), Magnitude::from_integer(1000));
        assert_eq!(Magnitude::parse("1/3").unwrap(), Magnitude::ratio(1, 3));
        assert!(Magnitude::parse("").is_err());
        assert!(Magnitude::parse("abc").is_err());
        assert!(Magnitude::parse("1/0").is_err());
        assert!(Magnitude::parse(".").is_err());
    }

    #[test]
    fn json_uses_numbers_when_exact_and_fractions_otherwise() {
        let third = Magnitude::ratio(1, 3);
        assert_eq!(serde_json::to_string(&third).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&Magnitude::ratio(27, 2)).unwrap(), "13.5");
        assert_eq!(serde_json::to_string(&Magnitude::from_integer(7)).unwrap(), "7");
        let back: Magnitude = serde_json::from_str("0.1").unwrap();
        assert_eq!(back, Magnitude::ratio(1, 10));
    }

    proptest! {
        #[test]
        fn json_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
            let m = Magnitude::ratio(n, d);
            let text = serde_json::to_string(&m).unwrap();
            let back: Magnitude = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
