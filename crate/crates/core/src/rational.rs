//! Exact rational scalars.
//!
//! All formal series coefficients in this crate are arbitrary-precision
//! rationals kept in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always normalized (gcd 1, denominator > 0).
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"num"` or `"num/den"` into a [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in rational {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Renders a rational as `"num"` or `"num/den"`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` to a rational, saturating on overflow.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        return v;
    }
    // num / den exceeded f64 range on one side; fall back to a rough quotient
    // of leading digits.
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let nd = r.numer().to_string().len() as i32;
    let dd = r.denom().to_string().len() as i32;
    sign * 10f64.powi(nd - dd)
}

/// Serde adapters rendering rationals as exact `"num/den"` strings.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, rational_to_string, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Like [`serde_str`] but for optional rationals.
pub mod serde_opt_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, rational_to_string, Rational};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&rational_to_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Like [`serde_str`] but for an optional list of rationals.
pub mod serde_opt_vec_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, rational_to_string, Rational};

    pub fn serialize<S: Serializer>(
        r: &Option<Vec<Rational>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match r {
            Some(v) => {
                let strings: Vec<String> = v.iter().map(rational_to_string).collect();
                s.serialize_some(&strings)
            }
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Rational>>, D::Error> {
        let v = Option::<Vec<String>>::deserialize(d)?;
        v.map(|v| {
            v.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}
