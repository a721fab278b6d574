//! Exact rational helpers on top of `num_rational::BigRational`.
//!
//! Every scalar in the crate is a [`Rational`]. Text form is always
//! `"num/den"` in lowest terms with the sign on the numerator, so
//! serialized output is canonical and byte-stable.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{GrwsError, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"`. Decimal points and exponents are rejected.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = |reason: &str| GrwsError::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty"));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(err("decimal input is not accepted; write num/den"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn pow(q: &Rational, e: u32) -> Rational {
    Pow::pow(q, e)
}

/// `q^e` for signed `e`; `q` must be nonzero when `e < 0`.
pub fn powi(q: &Rational, e: i64) -> Rational {
    let mag = pow(q, e.unsigned_abs() as u32);
    if e < 0 {
        mag.recip()
    } else {
        mag
    }
}

pub fn sign(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn exact_uint_root(x: &BigUint, k: u32) -> Option<BigUint> {
    let r = x.nth_root(k);
    if Pow::pow(&r, k) == *x {
        Some(r)
    } else {
        None
    }
}

/// Exact `k`-th root of a positive rational, if it is rational.
pub fn exact_root(q: &Rational, k: u32) -> Option<Rational> {
    if k == 0 || !q.is_positive() {
        return None;
    }
    let n = exact_uint_root(q.numer().magnitude(), k)?;
    let d = exact_uint_root(q.denom().magnitude(), k)?;
    Some(Rational::new(BigInt::from(n), BigInt::from(d)))
}

/// `q^s` for positive `q` and rational `s`, when the result is rational.
pub fn pow_rational(q: &Rational, s: &Rational) -> Option<Rational> {
    if !q.is_positive() {
        return None;
    }
    let a = s.numer().to_i64()?;
    let b = s.denom().to_u32()?;
    let root = exact_root(q, b)?;
    Some(powi(&root, a))
}

/// Largest `e` with `2^e <= q` for positive `q`.
pub fn floor_log2(q: &Rational) -> i64 {
    debug_assert!(q.is_positive());
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let mut e = nb - db;
    let two = int(2);
    while powi(&two, e) > *q {
        e -= 1;
    }
    while powi(&two, e + 1) <= *q {
        e += 1;
    }
    e
}

pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapter writing a [`Rational`] as its `"num/den"` string.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::{format_rational, Rational};
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }
}
