#![allow(dead_code)]

use grws_core::{Rational, ShiftParams};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rationals strictly inside (-1, 1).
pub fn unit() -> impl Strategy<Value = Rational> {
    (2i64..=24).prop_flat_map(|d| (-d + 1..d).prop_map(move |n| q(n, d)))
}

/// Rationals strictly inside (-1, 0).
pub fn neg_unit() -> impl Strategy<Value = Rational> {
    (2i64..=24).prop_flat_map(|d| (-d + 1..0).prop_map(move |n| q(n, d)))
}

/// `p` in (1, 3].
pub fn base() -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(|d| (1..=2 * d).prop_map(move |k| q(d + k, d)))
}

/// `t` in (0, 1).
pub fn fraction() -> impl Strategy<Value = Rational> {
    (1i64..32).prop_map(|n| q(n, 32))
}

pub fn params() -> impl Strategy<Value = ShiftParams> {
    (base(), unit(), unit()).prop_map(|(p, n, d)| ShiftParams::new(p, n, d).unwrap())
}

/// Interior points of Sector I: `N < D < 0`.
pub fn sector_i() -> impl Strategy<Value = ShiftParams> {
    (base(), neg_unit(), fraction()).prop_map(|(p, n, t)| {
        let d = &n * (Rational::from_integer(1.into()) - t);
        ShiftParams::new(p, n, d).unwrap()
    })
}

/// Interior points of Sector III: `N < 0`, `-N < D < 1`.
pub fn sector_iii() -> impl Strategy<Value = ShiftParams> {
    (base(), neg_unit(), fraction()).prop_map(|(p, n, t)| {
        let lo = -n.clone();
        let d = &lo + (Rational::from_integer(1.into()) - &lo) * t;
        ShiftParams::new(p, n, d).unwrap()
    })
}

pub fn grws(p: Rational, n: Rational, d: Rational) -> ShiftParams {
    ShiftParams::new(p, n, d).unwrap()
}
