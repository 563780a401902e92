//! Exact rational numbers and penalty values.
//!
//! Everything that ends up in a certificate or a report is a [`Rational`].
//! Text forms are `a/b`, plain integers, or finite decimals such as `0.25`;
//! all of them parse exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `a/b`, `a`, or a finite decimal (`-1.25`, `.5`, `3e-2` is rejected).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `a` for integers, `a/b` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: go through scaled integers.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite double (dyadic).
pub fn from_f64(value: f64) -> Rational {
    Rational::from_float(value).unwrap_or_else(zero)
}

/// Best rational approximation with denominator at most `max_denom`
/// (continued-fraction convergents and semiconvergents).
pub fn approximate(value: &Rational, max_denom: &BigInt) -> Rational {
    if value.denom() <= max_denom {
        return value.clone();
    }
    let negative = value.is_negative();
    let target = value.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if &q2 > max_denom {
            // semiconvergent with the largest admissible multiplier
            let k = (max_denom - &q0) / &q1;
            let cand_p = &p0 + &k * &p1;
            let cand_q = &q0 + &k * &q1;
            let c1 = Rational::new(p1.clone(), q1.clone());
            let c2 = Rational::new(cand_p, cand_q);
            let best = if (&c2 - &target).abs() < (&c1 - &target).abs() { c2 } else { c1 };
            return if negative { -best } else { best };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            let r = Rational::new(p1, q1);
            return if negative { -r } else { r };
        }
        rest = frac.recip();
    }
}

/// Serde adapter that writes rationals as exact strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        match raw {
            serde_json::Value::String(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()).map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

/// Serde adapter for lists of rationals written as exact strings.
pub mod serde_rationals {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(fmt_rational))
    }
}

/// Serde adapter for optional rationals.
pub mod serde_opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(r) => s.serialize_some(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }
}

/// A pair's penalty: finite and nonnegative, or infinite (the pair must be connected).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Penalty {
    Finite(Rational),
    Infinite,
}

impl Penalty {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Penalty::Finite(r) => Some(r),
            Penalty::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Penalty::Infinite)
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Finite(r) => f.write_str(&fmt_rational(r)),
            Penalty::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            Ok(Penalty::Infinite)
        } else {
            parse_rational(t).map(Penalty::Finite)
        }
    }
}

impl Serialize for Penalty {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Penalty {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        let text = match raw {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("expected penalty, got {other}"))),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Rational rendered for reports: exact string plus a decimal annotation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExactValue {
    pub exact: String,
    pub approx: f64,
}

impl From<&Rational> for ExactValue {
    fn from(r: &Rational) -> Self {
        ExactValue { exact: fmt_rational(r), approx: to_f64(r) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1e3").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(fmt_rational(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rational(&int(-5)), "-5");
    }

    #[test]
    fn penalty_tokens() {
        assert_eq!("inf".parse::<Penalty>().unwrap(), Penalty::Infinite);
        assert_eq!("1/2".parse::<Penalty>().unwrap(), Penalty::Finite(rat(1, 2)));
        assert_eq!(Penalty::Infinite.to_string(), "inf");
    }

    #[test]
    fn approximation_recovers_simple_fractions() {
        let x = from_f64(1.0 / 3.0);
        assert_eq!(approximate(&x, &BigInt::from(1000)), rat(1, 3));
        let y = from_f64(-22.0 / 7.0);
        assert_eq!(approximate(&y, &BigInt::from(100)), rat(-22, 7));
        assert_eq!(approximate(&rat(5, 2), &BigInt::from(3)), rat(5, 2));
    }

    proptest::proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = rat(n, d);
            proptest::prop_assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
        }
    }
}
