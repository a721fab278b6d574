//! Certified interval arithmetic with rational endpoints.
//!
//! Endpoints are exact rationals, so every operation here is exact up to
//! the explicit outward rounding in [`Interval::round_out`]. That rounding
//! snaps endpoints onto a dyadic grid to keep their size bounded while
//! still enclosing the true value.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::rational::{floor_log2, int, powi, rat, serde_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    lo: Rational,
    #[serde(with = "serde_rational")]
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Self {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Certified sign, or `None` when the interval straddles zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Compare against a rational: `Some(ordering)` when certified.
    pub fn cmp_rational(&self, q: &Rational) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if &self.lo > q {
            Some(Greater)
        } else if &self.hi < q {
            Some(Less)
        } else if self.is_point() {
            Some(Equal)
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.sign()? == 0 {
            return None;
        }
        Some(Interval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn checked_div(&self, other: &Interval) -> Option<Interval> {
        Some(self * &other.recip()?)
    }

    /// Integer power; negative exponents need an interval excluding zero.
    pub fn powi(&self, e: i64) -> Option<Interval> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        let mut acc = Interval::point(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        Some(acc)
    }

    /// Widen to the enclosing grid of step `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval::new(round_down(&self.lo, bits), round_up(&self.hi, bits))
    }

    /// Enclosure of `ln x` for a positive interval.
    pub fn ln(&self, bits: u32) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        let lo = ln_enclosure(&self.lo, bits);
        let hi = ln_enclosure(&self.hi, bits);
        Some(Interval::new(lo.lo, hi.hi))
    }

    pub fn midpoint_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / int(2))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Interval::new(lo, hi)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

pub fn round_down(q: &Rational, bits: u32) -> Rational {
    let scaled = q.numer() * pow2(bits);
    Rational::new(scaled.div_floor(q.denom()), pow2(bits))
}

pub fn round_up(q: &Rational, bits: u32) -> Rational {
    let scaled = q.numer() * pow2(bits);
    Rational::new(scaled.div_ceil(q.denom()), pow2(bits))
}

/// Enclosure of `x^(1/b)` for positive `x`, of width at most `2^-bits`.
pub fn root_enclosure(x: &Rational, b: u32, bits: u32) -> Interval {
    assert!(x.is_positive() && b >= 1);
    if b == 1 {
        return Interval::point(x.clone());
    }
    let shift = (b as usize) * (bits as usize);
    let scaled = (x.numer() << shift).magnitude().clone();
    let den = x.denom().magnitude().clone();
    let (floor, rem) = scaled.div_rem(&den);
    let r: BigUint = floor.nth_root(b);
    let exact = rem.is_zero() && Pow::pow(&r, b) == floor;
    let lo = Rational::new(BigInt::from(r.clone()), pow2(bits));
    if exact {
        Interval::point(lo)
    } else {
        let hi = Rational::new(BigInt::from(r + 1u32), pow2(bits));
        Interval::new(lo, hi)
    }
}

/// Enclosure of `x^(a/b)` for positive `x`.
pub fn rational_power_enclosure(x: &Rational, a: i64, b: u32, bits: u32) -> Interval {
    let base = powi(x, a);
    root_enclosure(&base, b, bits)
}

/// Partial sum bound for `atanh z`, `0 <= z <= 1/3`; lower or upper bound.
fn atanh_bound(z: &Rational, prec: u32, upper: bool) -> Rational {
    if z.is_zero() {
        return Rational::zero();
    }
    let r = |q: &Rational| {
        if upper {
            round_up(q, prec)
        } else {
            round_down(q, prec)
        }
    };
    let z2 = r(&(z * z));
    let one_minus = Rational::one() - &z2;
    let eps = Rational::new(BigInt::one(), pow2(prec));
    let mut zpow = r(z);
    let mut sum = Rational::zero();
    let mut t: i64 = 0;
    loop {
        sum += r(&(&zpow / int(2 * t + 1)));
        zpow = r(&(&zpow * &z2));
        t += 1;
        let tail = &zpow / (int(2 * t + 1) * &one_minus);
        if tail < eps {
            if upper {
                sum += round_up(&tail, prec);
            }
            return sum;
        }
    }
}

/// Enclosure of `atanh z` for `|z| <= 1/3`.
fn atanh_enclosure(z: &Rational, prec: u32) -> Interval {
    let mag = z.abs();
    let lo = atanh_bound(&mag, prec, false);
    let hi = atanh_bound(&mag, prec, true);
    if z.is_negative() {
        Interval::new(-hi, -lo)
    } else {
        Interval::new(lo, hi)
    }
}

/// Certified enclosure of `ln x` for a positive rational, width `O(2^-bits)`.
pub fn ln_enclosure(x: &Rational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of a nonpositive value");
    if x.is_one() {
        return Interval::point(Rational::zero());
    }
    let prec = bits + 16;
    let mut e = floor_log2(x);
    let mut y = x / powi(&int(2), e);
    if y > rat(4, 3) {
        y /= int(2);
        e += 1;
    }
    // y in [2/3, 4/3] so z in [-1/5, 1/7]
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let z_box = Interval::point(z).round_out(prec);
    let at_lo = atanh_enclosure(z_box.lo(), prec);
    let at_hi = atanh_enclosure(z_box.hi(), prec);
    let ln_y = Interval::new(at_lo.lo * int(2), at_hi.hi * int(2));
    let ln2 = atanh_enclosure(&rat(1, 3), prec).scale(&int(2));
    let total = &ln2.scale(&int(e)) + &ln_y;
    total.round_out(bits + 8)
}
