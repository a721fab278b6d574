//! Atomic Berger measures on the points `1/p^i`.
//!
//! With `m_0 = 1`, `m_i = p(D - p^{i-1}N)/(p^i - 1)` and `c_n = m_0 ⋯ m_n`,
//! the measure `a · Σ c_i δ_{1/p^i}` represents the moments whenever every
//! `m_i` is nonnegative. A zero `m_{k+1}` (the ray `D = p^k N`) makes the
//! measure `(k+1)`-atomic; otherwise it is truncated with a certified tail.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::analysis::{Depth, PropertyVerdict, VerdictStatus, Witness, WitnessValue};
use crate::error::{GrwsError, Result};
use crate::interval::Interval;
use crate::model::ShiftParams;
use crate::rational::{format_rational, pow, serde_rational, Rational};

pub const DEFAULT_DEPTH: usize = 24;

/// Extra terms allowed past `depth` while waiting for the tail ratio to drop
/// below one.
const MAX_TAIL_EXTENSION: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Normalizer {
    Exact(#[serde(with = "serde_rational")] Rational),
    Enclosed(Interval),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergerCoefficients {
    /// `m_0..`; ends with the zero coefficient when the support is finite.
    pub m: Vec<Rational>,
    /// `c_n = Π_{i<=n} m_i`, same length as `m`.
    pub c: Vec<Rational>,
    pub a: Normalizer,
    pub finite: bool,
    /// Upper bound on `Σ_{i>=c.len()} c_i`; zero when finite.
    pub tail: Rational,
}

impl BergerCoefficients {
    /// Number of atoms carrying positive mass.
    pub fn support_len(&self) -> usize {
        self.c.iter().filter(|c| !c.is_zero()).count()
    }
}

/// `m_i` for `i >= 1`.
pub fn m_coefficient(params: &ShiftParams, i: usize) -> Rational {
    assert!(i >= 1);
    let (p, n, d) = (params.p(), params.N(), params.D());
    let pi1 = pow(p, (i - 1) as u32);
    p * (d - &pi1 * n) / (&pi1 * p - Rational::one())
}

fn negative(index: usize, value: &Rational) -> GrwsError {
    GrwsError::NegativeCoefficient {
        index,
        value: format_rational(value),
    }
}

/// First `i` with `m_i < 0` when `N > 0` and `D` is off every ray.
fn first_negative_beyond(params: &ShiftParams) -> Option<usize> {
    let (p, n, d) = (params.p(), params.N(), params.D());
    if !n.is_positive() {
        return None;
    }
    let mut v = n.clone();
    let mut i = 1;
    loop {
        if &v == d {
            return None;
        }
        if &v > d {
            return Some(i);
        }
        v *= p;
        i += 1;
    }
}

pub fn berger_coefficients(params: &ShiftParams, depth: usize) -> Result<BergerCoefficients> {
    let mut m = vec![Rational::one()];
    let mut c = vec![Rational::one()];
    for i in 1..=depth {
        let mi = m_coefficient(params, i);
        if mi.is_negative() {
            return Err(negative(i, &mi));
        }
        let ci = &c[i - 1] * &mi;
        let zero = mi.is_zero();
        m.push(mi);
        c.push(ci);
        if zero {
            let total: Rational = c.iter().sum();
            return Ok(BergerCoefficients {
                m,
                c,
                a: Normalizer::Exact(total.recip()),
                finite: true,
                tail: Rational::zero(),
            });
        }
    }
    if let Some(i) = first_negative_beyond(params) {
        return Err(negative(i, &m_coefficient(params, i)));
    }

    // m_i = -N + (pD - N)/(p^i - 1) is monotone in i with limit -N, so
    // every later ratio is at most r = max(m_{L+1}, -N).
    let neg_n = -params.N().clone();
    let mut last = c[depth].clone();
    let mut partial = Rational::zero();
    let mut idx = depth;
    let tail = loop {
        let next = m_coefficient(params, idx + 1);
        let r = if next > neg_n {
            next.clone()
        } else {
            neg_n.clone()
        };
        if r < Rational::one() {
            break partial + &last * &r / (Rational::one() - &r);
        }
        if idx - depth >= MAX_TAIL_EXTENSION {
            return Err(GrwsError::TailBound(format!(
                "coefficient ratio stays at or above 1 past index {idx}"
            )));
        }
        last *= &next;
        partial += &last;
        idx += 1;
    };
    let s: Rational = c.iter().sum();
    let a = Normalizer::Enclosed(Interval::new((&s + &tail).recip(), s.recip()));
    Ok(BergerCoefficients {
        m,
        c,
        a,
        finite: false,
        tail,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    #[serde(with = "serde_rational")]
    pub atom: Rational,
    #[serde(with = "serde_rational")]
    pub density: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    pub truncated: bool,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_opt"
    )]
    pub tail_bound: Option<Rational>,
    /// Set on the boundary `D = -N`, `N < 0`, which the construction
    /// formally excludes.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub boundary: bool,
}

fn serialize_opt<S: serde::Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => serde_rational::serialize(q, s),
        None => s.serialize_none(),
    }
}

impl AtomicMeasure {
    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|a| &a.density).sum()
    }

    pub fn moment(&self, n: usize) -> Rational {
        self.atoms
            .iter()
            .map(|a| &a.density * pow(&a.atom, n as u32))
            .sum()
    }
}

/// Exact measure on a ray, otherwise truncated after `depth` coefficients.
///
/// Truncated densities are `c_i / S` with `S` the partial sum; for every
/// `n` the moment error is at most `T / (S + T) <= T / S = tail_bound`.
pub fn berger_measure(params: &ShiftParams, depth: usize) -> Result<AtomicMeasure> {
    let coeffs = berger_coefficients(params, depth)?;
    let s: Rational = coeffs.c.iter().sum();
    let p = params.p();
    let mut loc = Rational::one();
    let mut atoms = Vec::new();
    for c in coeffs.c.iter().filter(|c| !c.is_zero()) {
        atoms.push(Atom {
            atom: loc.clone(),
            density: c / &s,
        });
        loc /= p;
    }
    let n = params.N();
    Ok(AtomicMeasure {
        atoms,
        truncated: !coeffs.finite,
        tail_bound: (!coeffs.finite).then(|| &coeffs.tail / &s),
        boundary: n.is_negative() && params.D() == &-n.clone(),
    })
}

/// Compares measure moments with `γ_n` for `n <= n_max`: exactly for a
/// finite measure, within `tail_bound` for a truncated one.
pub fn verify_representation(
    params: &ShiftParams,
    measure: &AtomicMeasure,
    n_max: usize,
) -> PropertyVerdict {
    let depth = Depth { n_max, k_max: 0 };
    let tol = measure.tail_bound.clone().unwrap_or_else(Rational::zero);
    for n in 0..=n_max {
        let diff = measure.moment(n) - params.moment(n);
        if diff.abs() > tol {
            return PropertyVerdict {
                status: VerdictStatus::Violated,
                witness: Some(Witness {
                    n,
                    k: 0,
                    value: WitnessValue::Exact(diff),
                    spacing: None,
                }),
                depth,
            };
        }
    }
    PropertyVerdict::holds(depth)
}

/// `k + 1` for a point on `D = p^k N` (the diagonal is `k = 0`).
pub fn atom_count_on_ray(params: &ShiftParams) -> Result<u32> {
    let (p, n, d) = (params.p(), params.N(), params.D());
    if n == d {
        return Ok(1);
    }
    if !n.is_positive() {
        return Err(GrwsError::NotOnRay);
    }
    let mut v = n.clone();
    let mut k = 0;
    while &v < d {
        v *= p;
        k += 1;
    }
    if &v == d {
        Ok(k + 1)
    } else {
        Err(GrwsError::NotOnRay)
    }
}
