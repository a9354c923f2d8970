//! Arithmetic modes.
//!
//! Every algorithm in the crate is generic over [`Scalar`], which is
//! implemented for exact arbitrary-precision rationals ([`Rational`]) and
//! for `f64`. Exact mode decides signs literally; float mode treats values
//! within a small tolerance of zero as zero.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
pub use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
pub use crate::rational::Rational;

/// Default relative tie tolerance for float comparisons.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Relative margin a float comparison must clear to count as strict when
/// a checker re-examines a suspected violation.
pub const STRICT_MARGIN: f64 = 1e-7;

/// Absolute zero threshold used by the float simplex.
pub const FLOAT_PIVOT_EPS: f64 = 1e-9;

/// Number type an arithmetic mode computes with.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    /// `true` for exact rationals.
    const EXACT: bool;
    /// Human readable mode name.
    const MODE: &'static str;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Converts a finite float. Rationals take the binary value verbatim.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Maps a sampled float into the mode. Exact mode snaps to the 1/64 grid
    /// so that random exact inputs keep small denominators.
    fn from_sample(v: f64) -> Self;

    /// Half-width of the indifference band when comparing `a` with `b`.
    /// Always zero in exact mode.
    fn tie_tolerance(a: &Self, b: &Self, rel: f64) -> Self;

    /// Sign tests used by the simplex engine.
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_negligible(&self) -> bool;

    /// Positive divisor that brings `(c, d)` to canonical form: the Euclidean
    /// norm in float mode, the max absolute entry in exact mode.
    fn canonical_divisor(entries: &[Self]) -> Self;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn two() -> Self {
        Self::from_i64(2)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_sample(v: f64) -> Self {
        v
    }

    fn tie_tolerance(a: &Self, b: &Self, rel: f64) -> Self {
        rel * (1.0 + a.abs() + b.abs())
    }

    fn is_pos(&self) -> bool {
        *self > FLOAT_PIVOT_EPS
    }

    fn is_neg(&self) -> bool {
        *self < -FLOAT_PIVOT_EPS
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= FLOAT_PIVOT_EPS
    }

    fn canonical_divisor(entries: &[Self]) -> Self {
        entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn to_json(&self) -> Value {
        Value::from(*self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number {n} is not representable"))),
            Value::String(s) => {
                Ok(parse_rational(s)?.to_f64())
            }
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }

    fn from_sample(v: f64) -> Self {
        Rational::from((v * 64.0).round() as i64) / Rational::from(64)
    }

    fn tie_tolerance(_a: &Self, _b: &Self, _rel: f64) -> Self {
        Rational::zero()
    }

    fn is_pos(&self) -> bool {
        self.is_positive()
    }

    fn is_neg(&self) -> bool {
        self.is_negative()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn canonical_divisor(entries: &[Self]) -> Self {
        entries
            .iter()
            .map(|v| v.abs())
            .fold(Rational::zero(), |m, v| if v > m { v } else { m })
    }

    fn to_json(&self) -> Value {
        match self.to_i64() {
            Some(i) => Value::from(i),
            None => Value::String(self.to_string()),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(<Self as Scalar>::from_i64(i))
                } else if let Some(u) = n.as_u64() {
                    Ok(Rational::from_integer(BigInt::from(u)))
                } else {
                    n.as_f64()
                        .and_then(<Rational as Scalar>::from_f64)
                        .ok_or_else(|| Error::Parse(format!("number {n} is not finite")))
                }
            }
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }
}

/// Parses `"p/q"`, `"p"` or a plain decimal like `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(r) = Rational::from_str(s) {
        return Ok(r);
    }
    // Decimal notation, taken exactly in base ten.
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("cannot parse {s:?} as a rational")));
    }
    let numer = BigInt::from_str(&digits).map_err(|e| Error::Parse(e.to_string()))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Lossless conversion of a float slice into rationals.
pub fn rationals_from_f64(values: &[f64]) -> Result<Vec<Rational>> {
    values
        .iter()
        .map(|&v| {
            <Rational as Scalar>::from_f64(v)
                .ok_or_else(|| Error::InvalidArgument(format!("non-finite value {v}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rational_json_round_trip() {
        assert_eq!(q(3, 1).to_json(), serde_json::json!(3));
        assert_eq!(q(-1, 2).to_json(), serde_json::json!("-1/2"));
        assert_eq!(Rational::from_json(&serde_json::json!("-1/2")).unwrap(), q(-1, 2));
        assert_eq!(Rational::from_json(&serde_json::json!(0.25)).unwrap(), q(1, 4));
        assert_eq!(Rational::from_json(&serde_json::json!("0.1")).unwrap(), q(1, 10));
    }

    #[test]
    fn float_json_accepts_fraction_strings() {
        assert_eq!(f64::from_json(&serde_json::json!("1/4")).unwrap(), 0.25);
        assert!(f64::from_json(&serde_json::json!(null)).is_err());
    }

    #[test]
    fn float_conversion_is_dyadic() {
        let r = <Rational as Scalar>::from_f64(0.1).unwrap();
        assert_ne!(r, q(1, 10));
        assert_eq!(Scalar::to_f64(&r), 0.1);
    }

    #[test]
    fn canonical_divisors() {
        assert_eq!(Rational::canonical_divisor(&[q(-3, 1), q(2, 1)]), q(3, 1));
        assert!((f64::canonical_divisor(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn sample_grid() {
        assert_eq!(Rational::from_sample(0.5001), q(1, 2));
    }

    #[test]
    fn bad_strings() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }
}
