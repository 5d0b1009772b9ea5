//! Exact rational scalars and their canonical text form (`"p"` or `"p/q"`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number used for every coefficient and intersection value.
pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_big(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Canonical text: reduced `p/q` with positive denominator, or bare `p` for integers.
pub fn format_q(value: &Q) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: expected \"p\" or \"p/q\"", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

pub fn parse_q(text: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Q::new(num, den))
}

/// Whether the canonical text form was used (no redundant factors, no `/1`).
pub fn is_canonical_text(text: &str) -> bool {
    parse_q(text).map(|q| format_q(&q) == text).unwrap_or(false)
}

pub fn is_integral(value: &Q) -> bool {
    value.is_integer()
}

pub fn ceil(value: &Q) -> Q {
    value.ceil()
}

pub fn floor(value: &Q) -> Q {
    value.floor()
}

pub fn sign(value: &Q) -> i8 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

pub fn ser_q<S: Serializer>(value: &Q, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_q(value))
}

pub fn ser_opt_q<S: Serializer>(value: &Option<Q>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => serializer.serialize_some(&format_q(v)),
        None => serializer.serialize_none(),
    }
}

pub fn ser_q_vec<S: Serializer>(values: &[Q], serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(values.iter().map(format_q))
}

/// Serde adapter: rationals travel as `"p/q"` strings; plain JSON integers are accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub Q);

impl From<Q> for Rat {
    fn from(value: Q) -> Self {
        Rat(value)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q(&self.0))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\" string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_q(v).map(Rat).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(Q::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Err(E::custom(format!(
                    "floating-point value {v} is not allowed; write rationals as \"p/q\" strings"
                )))
            }
        }

        deserializer.deserialize_any(RatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_q("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse_q("-4/6").unwrap(), frac(-2, 3));
        assert_eq!(parse_q("7").unwrap(), int(7));
        assert_eq!(format_q(&frac(-4, 6)), "-2/3");
        assert_eq!(format_q(&frac(4, 2)), "2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("0.5").is_err());
        assert!(is_canonical_text("-2/3"));
        assert!(!is_canonical_text("2/1"));
        assert!(!is_canonical_text("4/6"));
    }

    #[test]
    fn rounding() {
        assert_eq!(ceil(&frac(-3, 2)), int(-1));
        assert_eq!(ceil(&int(-1)), int(-1));
        assert_eq!(floor(&frac(3, 2)), int(1));
        assert_eq!(ceil(&frac(1, 4)), int(1));
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let a: Rat = serde_json::from_str("\"1/2\"").unwrap();
        let b: Rat = serde_json::from_str("3").unwrap();
        assert_eq!(a.0, frac(1, 2));
        assert_eq!(b.0, int(3));
        assert!(serde_json::from_str::<Rat>("0.5").is_err());
        assert_eq!(serde_json::to_string(&Rat(frac(-1, 3))).unwrap(), "\"-1/3\"");
    }
}
