//! Finite-difference property batteries.
//!
//! All "completely X" properties are tested to a finite depth: the verdict
//! is `holds-to-depth`, `violated` with the lexicographically first `(n, k)`
//! witness, or `indeterminate` when a certified enclosure could not decide a
//! sign within the precision cap. Exact inputs never give `indeterminate`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GrwsError, Result};
use crate::interval::{rational_power_enclosure, Interval};
use crate::model::{ShiftParams, WeightSequence};
use crate::rational::{binomial, pow_rational, serde_rational, Rational};
use crate::sequence::{nabla_real, CertifiedSequence, LogSequence, RealSequence};

/// Starting working precision for certified sign decisions, in bits.
pub const START_BITS: u32 = 128;
/// Number of precision doublings before a cell is reported indeterminate.
pub const MAX_DOUBLINGS: u32 = 4;

pub const DEFAULT_N_MAX: usize = 10;
pub const DEFAULT_K_MAX: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    HoldsToDepth,
    Violated,
    Indeterminate,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::HoldsToDepth => "holds-to-depth",
            VerdictStatus::Violated => "violated",
            VerdictStatus::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum WitnessValue {
    Exact(#[serde(with = "serde_rational")] Rational),
    Interval(Interval),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub k: usize,
    pub value: WitnessValue,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_opt_rational"
    )]
    pub spacing: Option<Rational>,
}

fn serialize_opt_rational<S: serde::Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => serde_rational::serialize(q, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Depth {
    pub n_max: usize,
    pub k_max: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub status: VerdictStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub depth: Depth,
}

impl PropertyVerdict {
    pub fn holds(depth: Depth) -> Self {
        Self {
            status: VerdictStatus::HoldsToDepth,
            witness: None,
            depth,
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == VerdictStatus::HoldsToDepth
    }

    pub fn is_violated(&self) -> bool {
        self.status == VerdictStatus::Violated
    }

    /// `"violated@n=4,k=0"` style summary for CSV cells.
    pub fn summary(&self) -> String {
        match (&self.status, &self.witness) {
            (VerdictStatus::HoldsToDepth, _) => "holds-to-depth".into(),
            (s, Some(w)) => format!("{}@n={},k={}", s.as_str(), w.n, w.k),
            (s, None) => s.as_str().into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Monotone,
    Alternating,
    LogMonotone,
    LogAlternating,
}

impl Flavor {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "monotone" => Ok(Flavor::Monotone),
            "alternating" => Ok(Flavor::Alternating),
            "log-monotone" => Ok(Flavor::LogMonotone),
            "log-alternating" => Ok(Flavor::LogAlternating),
            other => Err(GrwsError::InvalidArgument(format!(
                "unknown battery flavor {other:?}"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Monotone => "monotone",
            Flavor::Alternating => "alternating",
            Flavor::LogMonotone => "log-monotone",
            Flavor::LogAlternating => "log-alternating",
        }
    }

    pub fn is_log(self) -> bool {
        matches!(self, Flavor::LogMonotone | Flavor::LogAlternating)
    }

    /// The sign of `∇^n` that refutes the property.
    fn bad_sign(self) -> i8 {
        match self {
            Flavor::Monotone | Flavor::LogMonotone => -1,
            Flavor::Alternating | Flavor::LogAlternating => 1,
        }
    }
}

/// What a battery runs on: a sequence, or the log of one.
pub enum BatteryTarget<'a> {
    Plain(&'a dyn RealSequence),
    Log(&'a LogSequence),
}

enum Cell {
    Fine,
    Bad(WitnessValue),
    Undecided(Interval),
}

fn plain_cell(seq: &dyn RealSequence, n: usize, k: usize, bad: i8) -> Cell {
    let mut bits = START_BITS;
    for attempt in 0..=MAX_DOUBLINGS {
        let v = nabla_real(seq, n, k, bits);
        match v.sign() {
            Some(s) if s == bad => {
                return Cell::Bad(if v.is_point() {
                    WitnessValue::Exact(v.lo().clone())
                } else {
                    WitnessValue::Interval(v)
                })
            }
            Some(_) => return Cell::Fine,
            None if attempt == MAX_DOUBLINGS => return Cell::Undecided(v),
            None => bits *= 2,
        }
    }
    unreachable!()
}

fn log_cell(seq: &LogSequence, n: usize, k: usize, bad: i8) -> Result<Cell> {
    let mut bits = START_BITS;
    for attempt in 0..=MAX_DOUBLINGS {
        match seq.nabla_sign(n, k, bits)? {
            Some(s) if s == bad => {
                let value = seq.nabla_value(n, k, bits.min(256))?;
                return Ok(Cell::Bad(WitnessValue::Interval(value)));
            }
            Some(_) => return Ok(Cell::Fine),
            None if attempt == MAX_DOUBLINGS => {
                return Ok(Cell::Undecided(seq.nabla_value(n, k, bits)?))
            }
            None => bits *= 2,
        }
    }
    unreachable!()
}

fn scan<F>(
    orders: std::ops::RangeInclusive<usize>,
    k_max: usize,
    depth: Depth,
    cell: F,
) -> Result<PropertyVerdict>
where
    F: Fn(usize, usize) -> Result<Cell> + Sync,
{
    let mut first_undecided: Option<Witness> = None;
    for n in orders {
        let row: Vec<Result<Cell>> = (0..=k_max).into_par_iter().map(|k| cell(n, k)).collect();
        for (k, c) in row.into_iter().enumerate() {
            match c? {
                Cell::Fine => {}
                Cell::Bad(value) => {
                    return Ok(PropertyVerdict {
                        status: VerdictStatus::Violated,
                        witness: Some(Witness {
                            n,
                            k,
                            value,
                            spacing: None,
                        }),
                        depth,
                    })
                }
                Cell::Undecided(iv) => {
                    if first_undecided.is_none() {
                        first_undecided = Some(Witness {
                            n,
                            k,
                            value: WitnessValue::Interval(iv),
                            spacing: None,
                        });
                    }
                }
            }
        }
    }
    Ok(match first_undecided {
        None => PropertyVerdict::holds(depth),
        Some(w) => PropertyVerdict {
            status: VerdictStatus::Indeterminate,
            witness: Some(w),
            depth,
        },
    })
}

/// `(∇^n a)_k <= 0` for `0 <= k <= k_max`.
pub fn is_n_alternating(seq: &dyn RealSequence, n: usize, k_max: usize) -> PropertyVerdict {
    let depth = Depth { n_max: n, k_max };
    scan(n..=n, k_max, depth, |n, k| Ok(plain_cell(seq, n, k, 1))).expect("plain cells cannot fail")
}

/// `(∇^n a)_k >= 0` for `0 <= k <= k_max`.
pub fn is_n_monotone(seq: &dyn RealSequence, n: usize, k_max: usize) -> PropertyVerdict {
    let depth = Depth { n_max: n, k_max };
    scan(n..=n, k_max, depth, |n, k| Ok(plain_cell(seq, n, k, -1)))
        .expect("plain cells cannot fail")
}

/// Joint verdict over `1 <= n <= n_max`, `0 <= k <= k_max`.
pub fn battery(
    target: BatteryTarget<'_>,
    flavor: Flavor,
    n_max: usize,
    k_max: usize,
) -> Result<PropertyVerdict> {
    let depth = Depth { n_max, k_max };
    let bad = flavor.bad_sign();
    match (target, flavor.is_log()) {
        (BatteryTarget::Plain(seq), false) => scan(1..=n_max, k_max, depth, |n, k| {
            Ok(plain_cell(seq, n, k, bad))
        }),
        (BatteryTarget::Log(seq), true) => {
            scan(1..=n_max, k_max, depth, |n, k| log_cell(seq, n, k, bad))
        }
        (BatteryTarget::Plain(_), true) => Err(GrwsError::InvalidArgument(
            "log flavors need a log sequence".into(),
        )),
        (BatteryTarget::Log(_), false) => Err(GrwsError::InvalidArgument(
            "plain flavors need a plain sequence".into(),
        )),
    }
}

/// Log battery on `ln α²` of a weight sequence (the MID test when alternating).
pub fn weight_log_battery(
    weights: &WeightSequence,
    flavor: Flavor,
    n_max: usize,
    k_max: usize,
) -> Result<PropertyVerdict> {
    let log = LogSequence::scaled(
        Arc::new(crate::sequence::ExactSequence::clone(weights.base())),
        weights.power().clone(),
    );
    battery(BatteryTarget::Log(&log), flavor, n_max, k_max)
}

/// `Σ_i (-1)^i C(n,i) γ_{k+i} >= 0` for every `k <= k_max`.
pub fn n_contractive(moments: &dyn RealSequence, n: usize, k_max: usize) -> PropertyVerdict {
    let depth = Depth { n_max: n, k_max };
    let cell = |k: usize| -> Cell {
        let mut bits = START_BITS;
        loop {
            let mut acc = Interval::point(Rational::from_integer(BigInt::from(0)));
            for i in 0..=n {
                let c = Rational::from_integer(binomial(n, i));
                let signed = if i % 2 == 0 { c } else { -c };
                acc = &acc + &moments.enclose(k + i, bits).scale(&signed);
            }
            match acc.sign() {
                Some(-1) => {
                    return Cell::Bad(if acc.is_point() {
                        WitnessValue::Exact(acc.lo().clone())
                    } else {
                        WitnessValue::Interval(acc)
                    })
                }
                Some(_) => return Cell::Fine,
                None if bits >= START_BITS << MAX_DOUBLINGS => return Cell::Undecided(acc),
                None => bits *= 2,
            }
        }
    };
    scan(n..=n, k_max, depth, |_, k| Ok(cell(k))).expect("contractivity cells cannot fail")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFlavor {
    Plain,
    Log,
}

/// Samples of `f(x) = (p^x + N)/(p^x + D)` at `x = h·k`.
///
/// When `p^h` is rational the samples are the weights of the GRWS with
/// parameter `p^h`; otherwise they are certified enclosures.
pub fn resampled_weights(params: &ShiftParams, h: &Rational) -> Result<Arc<dyn RealSequence>> {
    if !h.is_positive() {
        return Err(GrwsError::InvalidArgument(
            "sampling spacing must be positive".into(),
        ));
    }
    if let Some(ph) = pow_rational(params.p(), h) {
        let sub = ShiftParams::new(ph, params.N().clone(), params.D().clone())?;
        return Ok(Arc::new(sub.weights()));
    }
    let a = h
        .numer()
        .to_i64()
        .ok_or_else(|| GrwsError::InvalidArgument("spacing numerator too large".into()))?;
    let b = h
        .denom()
        .to_u32()
        .ok_or_else(|| GrwsError::InvalidArgument("spacing denominator too large".into()))?;
    let p = params.p().clone();
    let n = Interval::point(params.N().clone());
    let d = Interval::point(params.D().clone());
    Ok(Arc::new(CertifiedSequence::new(move |k, bits| {
        let x = rational_power_enclosure(&p, a * k as i64, b, bits + 16);
        let num = &x + &n;
        let den = &x + &d;
        num.checked_div(&den)
            .expect("p^x + D is positive")
            .round_out(bits + 8)
    })))
}

/// Refutation probe for interpolation by a (log) Bernstein function: a
/// Bernstein interpolant forces alternation at every spacing, so any
/// violation refutes it; `holds-to-depth` is only evidence.
pub fn function_alternation_probe(
    params: &ShiftParams,
    flavor: ProbeFlavor,
    spacings: &[Rational],
    n_max: usize,
    k_max: usize,
) -> Result<PropertyVerdict> {
    let depth = Depth { n_max, k_max };
    let mut undecided: Option<PropertyVerdict> = None;
    for h in spacings {
        let seq = resampled_weights(params, h)?;
        let verdict = match flavor {
            ProbeFlavor::Plain => battery(
                BatteryTarget::Plain(seq.as_ref()),
                Flavor::Alternating,
                n_max,
                k_max,
            )?,
            ProbeFlavor::Log => {
                let log = LogSequence::new(seq);
                battery(
                    BatteryTarget::Log(&log),
                    Flavor::LogAlternating,
                    n_max,
                    k_max,
                )?
            }
        };
        let tagged = |mut v: PropertyVerdict| {
            if let Some(w) = v.witness.as_mut() {
                w.spacing = Some(h.clone());
            }
            v
        };
        match verdict.status {
            VerdictStatus::Violated => return Ok(tagged(verdict)),
            VerdictStatus::Indeterminate if undecided.is_none() => {
                undecided = Some(tagged(verdict))
            }
            _ => {}
        }
    }
    Ok(undecided.unwrap_or_else(|| PropertyVerdict::holds(depth)))
}
