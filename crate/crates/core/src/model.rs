//! Parameters, weights, moments and sector geometry of a geometrically
//! regular weighted shift (GRWS): `α_n² = (p^n + N) / (p^n + D)` with
//! `p > 1` and `(N, D)` in the open unit square.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GrwsError, Result};
use crate::interval::{rational_power_enclosure, root_enclosure, Interval};
use crate::rational::{format_rational, pow, pow_rational, serde_rational, Rational};
use crate::sequence::{ExactSequence, RealSequence};

/// The parameter triple `(p, N, D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ShiftParams {
    #[serde(with = "serde_rational")]
    p: Rational,
    #[serde(rename = "N", with = "serde_rational")]
    n: Rational,
    #[serde(rename = "D", with = "serde_rational")]
    d: Rational,
}

#[derive(Deserialize)]
struct RawParams {
    #[serde(with = "serde_rational")]
    p: Rational,
    #[serde(rename = "N", with = "serde_rational")]
    n: Rational,
    #[serde(rename = "D", with = "serde_rational")]
    d: Rational,
}

impl TryFrom<RawParams> for ShiftParams {
    type Error = GrwsError;
    fn try_from(raw: RawParams) -> Result<Self> {
        ShiftParams::new(raw.p, raw.n, raw.d)
    }
}

fn in_open_unit(x: &Rational) -> bool {
    x.abs() < Rational::one()
}

impl ShiftParams {
    pub fn new(p: Rational, n: Rational, d: Rational) -> Result<Self> {
        if p <= Rational::one() {
            return Err(GrwsError::ParamOutOfSquare(format!(
                "p = {} must exceed 1",
                format_rational(&p)
            )));
        }
        if !in_open_unit(&n) || !in_open_unit(&d) {
            return Err(GrwsError::ParamOutOfSquare(format!(
                "(N, D) = ({}, {}) must lie in the open unit square",
                format_rational(&n),
                format_rational(&d)
            )));
        }
        Ok(Self { p, n, d })
    }

    /// Parameters for weights `√((K p^n + N') / (K p^n + D'))`.
    pub fn from_scaled_form(k: &Rational, p: Rational, n: &Rational, d: &Rational) -> Result<Self> {
        if !k.is_positive() {
            return Err(GrwsError::InvalidArgument(
                "scale K must be positive".into(),
            ));
        }
        Self::new(p, n / k, d / k)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> &Rational {
        &self.n
    }

    #[allow(non_snake_case)]
    pub fn D(&self) -> &Rational {
        &self.d
    }

    /// `α_n² = (p^n + N) / (p^n + D)`, exact.
    pub fn weight_sq(&self, n: usize) -> Rational {
        let pn = pow(&self.p, n as u32);
        (&pn + &self.n) / (&pn + &self.d)
    }

    /// `γ_n = Π_{j<n} α_j²`, computed directly.
    pub fn moment(&self, n: usize) -> Rational {
        (0..n).fold(Rational::one(), |acc, j| acc * self.weight_sq(j))
    }

    /// Enclosure of the weight `α_n` itself.
    pub fn weight_approx(&self, n: usize, bits: u32) -> Interval {
        root_enclosure(&self.weight_sq(n), 2, bits)
    }

    pub fn weights(&self) -> WeightSequence {
        WeightSequence::from_params(self)
    }

    pub fn moments(&self) -> MomentSequence {
        MomentSequence::new(self.weights())
    }

    pub fn on_diagonal(&self) -> bool {
        self.n == self.d
    }

    pub fn classify(&self, ray_depth: u32) -> SectorLabel {
        classify(self, ray_depth)
    }
}

impl fmt::Display for ShiftParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(p={}, N={}, D={})",
            format_rational(&self.p),
            format_rational(&self.n),
            format_rational(&self.d)
        )
    }
}

/// Squared weights as `base_n ^ power`.
///
/// GRWS weights have `power = 1`. Schur powers scale `power`; the Aluthge
/// transform halves it over the product `base_n · base_{n+1}`. Keeping the
/// exponent symbolic lets log tests stay exact.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    base: ExactSequence,
    power: Rational,
    params: Option<ShiftParams>,
}

impl WeightSequence {
    pub fn from_params(params: &ShiftParams) -> Self {
        let pr = params.clone();
        Self {
            base: ExactSequence::from_fn(move |n| pr.weight_sq(n)),
            power: Rational::one(),
            params: Some(params.clone()),
        }
    }

    /// Explicit squared weights; every term must be positive.
    pub fn from_exact(base: ExactSequence) -> Self {
        Self {
            base,
            power: Rational::one(),
            params: None,
        }
    }

    pub fn with_power(base: ExactSequence, power: Rational) -> Self {
        assert!(power.is_positive(), "weight power must be positive");
        Self {
            base,
            power,
            params: None,
        }
    }

    pub fn base(&self) -> &ExactSequence {
        &self.base
    }

    pub fn power(&self) -> &Rational {
        &self.power
    }

    pub fn params(&self) -> Option<&ShiftParams> {
        self.params.as_ref()
    }

    /// `α_n²` exactly, when rational.
    pub fn weight_sq(&self, n: usize) -> Option<Rational> {
        let b = self.base.term(n);
        if self.power.is_one() {
            Some(b)
        } else {
            pow_rational(&b, &self.power)
        }
    }

    pub fn weight_sq_enclosure(&self, n: usize, bits: u32) -> Interval {
        match self.weight_sq(n) {
            Some(q) => Interval::point(q),
            None => power_enclosure(&self.base.term(n), &self.power, bits),
        }
    }
}

fn power_enclosure(base: &Rational, power: &Rational, bits: u32) -> Interval {
    let a = power.numer().to_i64().expect("power numerator too large");
    let b = power.denom().to_u32().expect("power denominator too large");
    rational_power_enclosure(base, a, b, bits)
}

impl RealSequence for WeightSequence {
    fn exact_term(&self, n: usize) -> Option<Rational> {
        self.weight_sq(n)
    }

    fn enclose(&self, n: usize, bits: u32) -> Interval {
        self.weight_sq_enclosure(n, bits)
    }

    fn is_exact(&self) -> bool {
        self.power.is_integer()
    }
}

/// `γ_0 = 1`, `γ_{n+1} = γ_n · α_n²`, memoized as a growing prefix.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    weights: WeightSequence,
    base_prefix: Arc<RwLock<Vec<Rational>>>,
}

impl MomentSequence {
    pub fn new(weights: WeightSequence) -> Self {
        Self {
            weights,
            base_prefix: Arc::new(RwLock::new(vec![Rational::one()])),
        }
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// `Π_{j<n} base_j`; equals `γ_n` when the weight power is 1.
    pub fn base_moment(&self, n: usize) -> Rational {
        {
            let cache = self.base_prefix.read().expect("moment cache poisoned");
            if let Some(v) = cache.get(n) {
                return v.clone();
            }
        }
        let mut cache = self.base_prefix.write().expect("moment cache poisoned");
        while cache.len() <= n {
            let i = cache.len();
            let next = &cache[i - 1] * self.weights.base.term(i - 1);
            cache.push(next);
        }
        cache[n].clone()
    }

    /// `γ_n` exactly, or `NotExact` when the weight power makes it irrational.
    pub fn moment(&self, n: usize) -> Result<Rational> {
        let b = self.base_moment(n);
        if self.weights.power.is_one() {
            return Ok(b);
        }
        pow_rational(&b, &self.weights.power).ok_or(GrwsError::NotExact { index: n })
    }

    /// Exact sequence view; panics on non-exact terms.
    pub fn as_exact(&self) -> ExactSequence {
        let me = self.clone();
        ExactSequence::from_fn(move |n| me.moment(n).expect("moment is not exact"))
    }
}

impl RealSequence for MomentSequence {
    fn exact_term(&self, n: usize) -> Option<Rational> {
        self.moment(n).ok()
    }

    fn enclose(&self, n: usize, bits: u32) -> Interval {
        match self.moment(n) {
            Ok(q) => Interval::point(q),
            Err(_) => power_enclosure(&self.base_moment(n), &self.weights.power, bits),
        }
    }

    fn is_exact(&self) -> bool {
        self.weights.power.is_integer()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl Sector {
    pub const ALL: [Sector; 8] = [
        Sector::I,
        Sector::II,
        Sector::III,
        Sector::IV,
        Sector::V,
        Sector::VI,
        Sector::VII,
        Sector::VIII,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::I => "I",
            Sector::II => "II",
            Sector::III => "III",
            Sector::IV => "IV",
            Sector::V => "V",
            Sector::VI => "VI",
            Sector::VII => "VII",
            Sector::VIII => "VIII",
        }
    }

    /// Closed-cone membership of `(N, D)`.
    pub fn contains(self, n: &Rational, d: &Rational) -> bool {
        let zero = Rational::zero();
        let neg_n = -n;
        match self {
            Sector::I => n <= &zero && n <= d && d <= &zero,
            Sector::II => n <= &zero && &zero <= d && d <= &neg_n,
            Sector::III => n <= &zero && &neg_n <= d,
            Sector::IV => &zero <= n && n <= d,
            Sector::V => &zero <= d && d <= n,
            Sector::VI => n >= &zero && &neg_n <= d && d <= &zero,
            Sector::VII => n >= &zero && d <= &neg_n,
            Sector::VIII => d <= n && n <= &zero,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorLabel {
    pub sectors: BTreeSet<Sector>,
    pub on_diagonal: bool,
    pub viiia: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_ray_k: Option<u32>,
}

impl SectorLabel {
    pub fn contains(&self, s: Sector) -> bool {
        self.sectors.contains(&s)
    }

    /// `"I+II"` style join, used in CSV output.
    pub fn joined(&self) -> String {
        self.sectors
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Exponent `k` with `D = p^k N` for `N > 0`, searched up to `max_k`.
pub fn ray_exponent(params: &ShiftParams, max_k: u32) -> Option<u32> {
    let (p, n, d) = (params.p(), params.N(), params.D());
    if n == d {
        return Some(0);
    }
    if !n.is_positive() || d < n {
        return None;
    }
    let mut v = n.clone();
    for k in 1..=max_k {
        v *= p;
        if &v == d {
            return Some(k);
        }
        if &v > d {
            return None;
        }
    }
    None
}

pub fn classify(params: &ShiftParams, ray_depth: u32) -> SectorLabel {
    let (n, d) = (params.N(), params.D());
    let sectors: BTreeSet<Sector> = Sector::ALL
        .into_iter()
        .filter(|s| s.contains(n, d))
        .collect();
    let pn = params.p() * n;
    let viiia = &pn <= d && d <= n && n <= &Rational::zero();
    SectorLabel {
        sectors,
        on_diagonal: n == d,
        viiia,
        special_ray_k: ray_exponent(params, ray_depth),
    }
}
