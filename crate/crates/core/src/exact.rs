//! Exact rational payoffs and their JSON representation.
//!
//! Payoffs are `BigRational`s. Decimal literals in JSON documents are parsed
//! digit-for-digit, so `0.1` is exactly one tenth. Values with a terminating
//! decimal expansion serialize back to the same literal; anything else (for
//! example a third produced by normalization) is written as the nearest `f64`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};

pub type Q = BigRational;

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn ratio(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` without rounding.
pub fn parse_decimal(text: &str) -> Option<Q> {
    let s = text.trim();
    let (negative, s) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], i64::from_str(&s[pos + 1..]).ok()?),
        None => (s, 0),
    };
    let (whole, frac) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let scale = exponent - frac.len() as i64;
    // Guard against absurd exponents that would allocate gigabytes.
    if scale.unsigned_abs() > 4096 {
        return None;
    }
    let ten_pow = num_traits::pow(BigInt::from(10), scale.unsigned_abs() as usize);
    let value = if scale >= 0 {
        numer *= ten_pow;
        Q::from_integer(numer)
    } else {
        Q::new(numer, ten_pow)
    };
    Some(if negative { -value } else { value })
}

/// Accepts a decimal literal or a fraction `p/q`.
pub fn parse_rational(text: &str) -> Option<Q> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => parse_decimal(text),
    }
}

/// Lifts a finite float to the rational it denotes, bit for bit.
pub fn from_f64_exact(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Lifts a finite float through its shortest round-trip decimal, so `0.1_f64`
/// becomes exactly `1/10`.
pub fn from_f64_decimal(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    parse_decimal(&format!("{x}"))
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact decimal rendering when the denominator has no prime factors other
/// than 2 and 5.
pub fn to_decimal_string(q: &Q) -> Option<String> {
    let mut denom = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = q * Q::from_integer(num_traits::pow(BigInt::from(10), places));
    debug_assert!(scaled.is_integer());
    let digits = scaled.to_integer().abs().to_string();
    let sign = if q.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = padded.split_at(padded.len() - places);
    let frac = frac.trim_end_matches('0');
    Some(if frac.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    })
}

pub fn to_json_number(q: &Q) -> Value {
    match to_decimal_string(q) {
        Some(s) => Number::from_str(&s).map(Value::Number).unwrap_or(Value::Null),
        None => Number::from_f64(to_f64(q)).map(Value::Number).unwrap_or(Value::Null),
    }
}

/// Why a JSON value could not be read as an exact payoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumberError {
    NonFinite,
    Malformed(String),
}

pub fn from_json_value(v: &Value) -> Result<Q, NumberError> {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            parse_decimal(&text).ok_or(NumberError::Malformed(text))
        }
        Value::String(s) => {
            let lower = s.trim().to_ascii_lowercase();
            let bare = lower.trim_start_matches(['+', '-']);
            if matches!(bare, "nan" | "inf" | "infinity") {
                return Err(NumberError::NonFinite);
            }
            parse_rational(s).ok_or_else(|| NumberError::Malformed(s.clone()))
        }
        Value::Null => Err(NumberError::NonFinite),
        other => Err(NumberError::Malformed(other.to_string())),
    }
}

/// Conversion between exact values and JSON, used through [`exact_serde`].
pub trait ExactJson: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
}

impl ExactJson for Q {
    fn to_json(&self) -> Value {
        to_json_number(self)
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        from_json_value(v).map_err(|e| format!("{e:?}"))
    }
}

impl<T: ExactJson> ExactJson for Vec<T> {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(ExactJson::to_json).collect())
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        v.as_array()
            .ok_or_else(|| "expected an array".to_string())?
            .iter()
            .map(T::from_json)
            .collect()
    }
}

impl<T: ExactJson> ExactJson for Option<T> {
    fn to_json(&self) -> Value {
        self.as_ref().map_or(Value::Null, ExactJson::to_json)
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        if v.is_null() {
            Ok(None)
        } else {
            T::from_json(v).map(Some)
        }
    }
}

impl<T: ExactJson> ExactJson for (T, T) {
    fn to_json(&self) -> Value {
        Value::Array(vec![self.0.to_json(), self.1.to_json()])
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((T::from_json(a)?, T::from_json(b)?)),
            _ => Err("expected a pair".to_string()),
        }
    }
}

/// `#[serde(with = "exact_serde")]` for fields built from [`Q`].
pub mod exact_serde {
    use super::*;

    pub fn serialize<T: ExactJson, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        value.to_json().serialize(s)
    }

    pub fn deserialize<'de, T: ExactJson, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let v = Value::deserialize(d)?;
        T::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_decimal("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_decimal("1e3").unwrap(), int(1000));
        assert_eq!(parse_decimal("125E-3").unwrap(), ratio(1, 8));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_string(&ratio(3, 4)).unwrap(), "0.75");
        assert_eq!(to_decimal_string(&int(-16)).unwrap(), "-16");
        assert_eq!(to_decimal_string(&ratio(-1, 20)).unwrap(), "-0.05");
        assert_eq!(to_decimal_string(&ratio(1, 3)), None);
    }

    #[test]
    fn float_lifting() {
        assert_eq!(from_f64_decimal(0.1).unwrap(), ratio(1, 10));
        assert_ne!(from_f64_exact(0.1).unwrap(), ratio(1, 10));
        assert_eq!(from_f64_exact(0.25).unwrap(), ratio(1, 4));
        assert!(from_f64_decimal(f64::NAN).is_none());
    }

    #[test]
    fn json_strings() {
        assert_eq!(from_json_value(&Value::from("NaN")), Err(NumberError::NonFinite));
        assert_eq!(from_json_value(&Value::from("-inf")), Err(NumberError::NonFinite));
        assert_eq!(from_json_value(&Value::from("2/6")).unwrap(), ratio(1, 3));
    }
}
