//! Completing an initial moment segment by a GRWS.
//!
//! The target segment comes from the two-atomic measure
//! `(δ_1 + a δ_{1/p}) / (1 + a)`. With the geometric parameter `q` free,
//! the completions form a one-parameter family indexed by `N`.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GrwsError, Result};
use crate::model::{classify, Sector, SectorLabel, ShiftParams};
use crate::rational::{format_rational, pow, serde_rational, Rational};

/// Ray search depth used when labelling solutions.
const LABEL_RAY_DEPTH: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoAtomSpec {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational")]
    p: Rational,
}

impl TwoAtomSpec {
    pub fn new(a: Rational, p: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(GrwsError::InvalidArgument(
                "mass ratio a must be positive".into(),
            ));
        }
        if p <= Rational::one() {
            return Err(GrwsError::InvalidArgument("p must exceed 1".into()));
        }
        Ok(Self { a, p })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }
}

/// `(γ_0, γ_1, γ_2)` of the two-atomic measure.
pub fn target_moments(spec: &TwoAtomSpec) -> [Rational; 3] {
    let (a, p) = (&spec.a, &spec.p);
    let one = Rational::one();
    let total = &one + a;
    [
        one.clone(),
        (&one + a / p) / &total,
        (&one + a / (p * p)) / &total,
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionSolution {
    #[serde(with = "serde_rational")]
    pub q: Rational,
    #[serde(rename = "N", with = "serde_rational")]
    pub n: Rational,
    #[serde(rename = "D", with = "serde_rational")]
    pub d: Rational,
    pub sector: SectorLabel,
}

impl CompletionSolution {
    fn from_params(params: &ShiftParams) -> Self {
        Self {
            q: params.p().clone(),
            n: params.N().clone(),
            d: params.D().clone(),
            sector: classify(params, LABEL_RAY_DEPTH),
        }
    }

    pub fn params(&self) -> ShiftParams {
        ShiftParams::new(self.q.clone(), self.n.clone(), self.d.clone())
            .expect("solutions are validated on construction")
    }
}

fn reproduces(params: &ShiftParams, target: &[Rational]) -> bool {
    target
        .iter()
        .enumerate()
        .all(|(i, g)| &params.moment(i) == g)
}

fn checked(params: ShiftParams, target: &[Rational]) -> Result<CompletionSolution> {
    if !reproduces(&params, target) {
        return Err(GrwsError::NoSolution(format!(
            "{params} does not reproduce the target moments"
        )));
    }
    Ok(CompletionSolution::from_params(&params))
}

/// The completion with `q = p`: `N = a/p`, `D = a`.
pub fn same_p_completion(spec: &TwoAtomSpec) -> Result<CompletionSolution> {
    if spec.a >= Rational::one() {
        return Err(GrwsError::TargetOutsideSquare(format!(
            "D = a = {} is not below 1",
            format_rational(&spec.a)
        )));
    }
    let params = ShiftParams::new(spec.p.clone(), &spec.a / &spec.p, spec.a.clone())?;
    checked(params, &target_moments(spec))
}

/// Solves the two moment equations at `q = p` as a linear system in
/// `(N, D)`; `None` when the system is singular.
pub fn same_p_linear_solution(spec: &TwoAtomSpec) -> Option<(Rational, Rational)> {
    let [_, g1, g2] = target_moments(spec);
    let p = &spec.p;
    // N - g1 D = g1 - 1 ;  g1 N - g2 D = p (g2 - g1)
    let det = &g1 * &g1 - &g2;
    if det.is_zero() {
        return None;
    }
    let r1 = &g1 - Rational::one();
    let r2 = p * (&g2 - &g1);
    let n = (-(&g2) * &r1 + &g1 * &r2) / &det;
    let d = (&r2 - &g1 * &r1) / &det;
    Some((n, d))
}

/// The member of the completion family with the given `N`, `-1 < N <= 0`.
pub fn family_completion(spec: &TwoAtomSpec, n: &Rational) -> Result<CompletionSolution> {
    let one = Rational::one();
    if n <= &-one.clone() || n.is_positive() {
        return Err(GrwsError::InvalidArgument(format!(
            "family parameter N = {} must lie in (-1, 0]",
            format_rational(n)
        )));
    }
    let (a, p) = (&spec.a, &spec.p);
    let den = a + p;
    let q = (a + n * p * p - n * p + p * p) / &den;
    let d = (a * n * p + a * p - a + n * p) / &den;
    let params = ShiftParams::new(q, n.clone(), d)?;
    checked(params, &target_moments(spec))
}

/// Completion of `(1, γ_1, γ_2)` for a prescribed `N`, any `q`.
///
/// `γ_1 = (1+N)/(1+D)` fixes `D`; `r = γ_2/γ_1 = (q+N)/(q+D)` then fixes
/// `q` unless `r = 1`, which forces `N = D` and hence `γ_1 = 1`.
pub fn complete_segment(g1: &Rational, g2: &Rational, n: &Rational) -> Result<CompletionSolution> {
    if !g1.is_positive() {
        return Err(GrwsError::InvalidArgument("γ_1 must be positive".into()));
    }
    let one = Rational::one();
    let d = (&one + n) / g1 - &one;
    let r = g2 / g1;
    if r.is_one() {
        if g1.is_one() && n.abs() < one {
            return Err(GrwsError::NoSolution(
                "the segment is that of the unweighted shift; q is undetermined".into(),
            ));
        }
        return Err(GrwsError::NoSolution(
            "γ_2 = γ_1 forces N = D, which forces γ_1 = 1".into(),
        ));
    }
    let q = (&r * &d - n) / (&one - &r);
    let params =
        ShiftParams::new(q, n.clone(), d).map_err(|e| GrwsError::NoSolution(e.to_string()))?;
    checked(params, &[one, g1.clone(), g2.clone()])
}

/// Segment of `(1 - t) δ_1 + t δ_0`, `0 < t < 1`, which no GRWS completes.
pub fn atom_at_zero_segment(t: &Rational) -> Result<[Rational; 3]> {
    if !t.is_positive() || t >= &Rational::one() {
        return Err(GrwsError::InvalidArgument(
            "density at 0 must lie in (0, 1)".into(),
        ));
    }
    let g = Rational::one() - t;
    Ok([Rational::one(), g.clone(), g])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorRange {
    pub sector: Sector,
    /// Open lower endpoint.
    #[serde(with = "serde_rational")]
    pub above: Rational,
    /// Closed upper endpoint.
    #[serde(with = "serde_rational")]
    pub upto: Rational,
}

impl SectorRange {
    pub fn contains(&self, n: &Rational) -> bool {
        &self.above < n && n <= &self.upto
    }
}

/// Ranges of `N` whose completion lies in Sector I, II and III.
pub fn family_sector_ranges(spec: &TwoAtomSpec) -> [SectorRange; 3] {
    let (a, p) = (&spec.a, &spec.p);
    let top = a - a * p;
    let t1 = &top / ((a + Rational::one()) * p);
    let t2 = &top / (a * p + a + p * Rational::from_integer(2.into()));
    [
        SectorRange {
            sector: Sector::I,
            above: -Rational::one(),
            upto: t1.clone(),
        },
        SectorRange {
            sector: Sector::II,
            above: t1,
            upto: t2.clone(),
        },
        SectorRange {
            sector: Sector::III,
            above: t2,
            upto: Rational::zero(),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeAtomSearch {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub target: Vec<Rational>,
    pub candidates_tried: usize,
    pub completions: Vec<CompletionSolution>,
}

/// `(1, γ_1, γ_2, γ_3)` of a finitely atomic measure given as
/// `(location, weight)` pairs; weights are normalized.
pub fn segment_of_measure(atoms: &[(Rational, Rational)], len: usize) -> Result<Vec<Rational>> {
    let total: Rational = atoms.iter().map(|(_, w)| w).sum();
    if !total.is_positive() || atoms.iter().any(|(_, w)| w.is_negative()) {
        return Err(GrwsError::InvalidArgument(
            "atom weights must be nonnegative with positive total".into(),
        ));
    }
    Ok((0..len)
        .map(|n| {
            atoms
                .iter()
                .map(|(x, w)| w * pow(x, n as u32))
                .sum::<Rational>()
                / &total
        })
        .collect())
}

/// For each candidate `q`, solves the first two moment equations for
/// `(N, D)` and keeps the GRWS that also matches `γ_3`. Reports what it
/// finds; an empty result is not a proof that no completion exists.
pub fn three_atom_search(target: &[Rational], q_grid: &[Rational]) -> Result<ThreeAtomSearch> {
    if target.len() != 4 || !target[0].is_one() {
        return Err(GrwsError::InvalidArgument(
            "need a segment (1, γ_1, γ_2, γ_3)".into(),
        ));
    }
    let (g1, g2, g3) = (&target[1], &target[2], &target[3]);
    let det = g1 * g1 - g2;
    let completions: Vec<CompletionSolution> = if det.is_zero() {
        Vec::new()
    } else {
        q_grid
            .par_iter()
            .filter_map(|q| {
                let r1 = g1 - Rational::one();
                let r2 = q * (g2 - g1);
                let n = (-g2 * &r1 + g1 * &r2) / &det;
                let d = (&r2 - g1 * &r1) / &det;
                let params = ShiftParams::new(q.clone(), n, d).ok()?;
                (&params.moment(3) == g3).then(|| CompletionSolution::from_params(&params))
            })
            .collect()
    };
    Ok(ThreeAtomSearch {
        target: target.to_vec(),
        candidates_tried: q_grid.len(),
        completions,
    })
}

/// `1 + i·step` for `1 <= i <= count`.
pub fn q_grid(step: &Rational, count: usize) -> Vec<Rational> {
    (1..=count)
        .map(|i| Rational::one() + step * Rational::from_integer(i.into()))
        .collect()
}
