//! Shift-to-shift transforms: Schur powers, the Aluthge transform, affine
//! subshifts, reciprocal and quotient shifts, and the derived weights of
//! Subsector VIIIA.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{GrwsError, Result};
use crate::model::{classify, ShiftParams, WeightSequence};
use crate::rational::{binomial, int, pow, Rational};
use crate::sequence::{nabla, ExactSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    stride: usize,
    offset: usize,
}

impl AffineMap {
    pub fn new(stride: usize, offset: usize) -> Result<Self> {
        if stride == 0 {
            return Err(GrwsError::InvalidArgument(
                "affine stride must be positive".into(),
            ));
        }
        Ok(Self { stride, offset })
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn apply(&self, n: usize) -> usize {
        self.stride * n + self.offset
    }
}

/// Weights `α_n^s`, i.e. squared weights `(α_n²)^s`.
pub fn schur_power(weights: &WeightSequence, s: &Rational) -> Result<WeightSequence> {
    if !s.is_positive() {
        return Err(GrwsError::InvalidArgument(
            "Schur exponent must be positive".into(),
        ));
    }
    if s.is_one() {
        return Ok(weights.clone());
    }
    Ok(WeightSequence::with_power(
        weights.base().clone(),
        weights.power() * s,
    ))
}

/// Weights `√(α_n α_{n+1})`: squared weights `(b_n b_{n+1})^{power/2}`.
pub fn aluthge(weights: &WeightSequence) -> WeightSequence {
    let base = weights.base().clone();
    let product = ExactSequence::from_fn(move |n| base.term(n) * base.term(n + 1));
    WeightSequence::with_power(product, weights.power() / int(2))
}

pub fn affine_subshift_params(params: &ShiftParams, map: AffineMap) -> ShiftParams {
    let pr = pow(params.p(), map.offset as u32);
    ShiftParams::new(
        pow(params.p(), map.stride as u32),
        params.N() / &pr,
        params.D() / &pr,
    )
    .expect("subshift parameters stay in the open square")
}

/// Weights `α_{ℓn + r}`.
pub fn affine_subshift(weights: &WeightSequence, map: AffineMap) -> WeightSequence {
    let base = weights.base().clone();
    let sub = ExactSequence::from_fn(move |n| base.term(map.apply(n)));
    WeightSequence::with_power(sub, weights.power().clone())
}

/// Swaps the roles of `N` and `D`; weights become reciprocals.
pub fn reciprocal(params: &ShiftParams) -> ShiftParams {
    ShiftParams::new(params.p().clone(), params.D().clone(), params.N().clone())
        .expect("reflection keeps the point in the square")
}

/// Squared weights `α_{n+1}² / α_n²`.
///
/// For increasing MID weights this sequence is log completely monotone;
/// its reciprocal (see [`reciprocal_weights`]) is log completely
/// alternating.
pub fn quotient_shift(weights: &WeightSequence) -> WeightSequence {
    let base = weights.base().clone();
    let q = ExactSequence::from_fn(move |n| base.term(n + 1) / base.term(n));
    WeightSequence::with_power(q, weights.power().clone())
}

/// Squared weights `1 / α_n²`; on a GRWS this matches [`reciprocal`].
pub fn reciprocal_weights(weights: &WeightSequence) -> WeightSequence {
    WeightSequence::with_power(
        weights.base().map(|n, s| s.term(n).recip()),
        weights.power().clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PGCoefficients {
    pub k: usize,
    pub n: usize,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub c: Vec<Rational>,
}

/// Coefficients of `(1 + x + … + x^{k-1})^n`.
pub fn pg_coefficients(k: usize, n: usize) -> Result<PGCoefficients> {
    if k < 2 || n < 1 {
        return Err(GrwsError::InvalidArgument("need k >= 2 and n >= 1".into()));
    }
    let mut c = vec![Rational::one()];
    for _ in 0..n {
        let mut next = vec![Rational::zero(); c.len() + k - 1];
        for (i, v) in c.iter().enumerate() {
            for slot in &mut next[i..i + k] {
                *slot += v;
            }
        }
        c = next;
    }
    Ok(PGCoefficients { k, n, c })
}

/// `Σ_i (-1)^i C(n,i) β_{k(m+i)+i0} == Σ_j c_j (∇^n β)(km + j + i0)`.
pub fn pg_identity_check(
    seq: &ExactSequence,
    k: usize,
    n: usize,
    m: usize,
    i0: usize,
) -> Result<bool> {
    let coeffs = pg_coefficients(k, n)?;
    let lhs: Rational = (0..=n)
        .map(|i| {
            let t = Rational::from(binomial(n, i)) * seq.term(k * (m + i) + i0);
            if i % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum();
    let rhs: Rational = coeffs
        .c
        .iter()
        .enumerate()
        .map(|(j, c)| c * nabla(seq, n, k * m + j + i0))
        .sum();
    Ok(lhs == rhs)
}

#[derive(Clone, Debug)]
pub struct DerivedWeights {
    /// `w_n = (1/p)(p^n + N)/(p^n + D/p)`.
    pub weights: WeightSequence,
    /// `(p, N, D/p)`, a Sector I point.
    pub witness: ShiftParams,
}

pub fn viiia_derived_weights(params: &ShiftParams) -> Result<DerivedWeights> {
    if !classify(params, 0).viiia {
        return Err(GrwsError::OutsideSector(
            "Subsector VIIIA (pN <= D <= N <= 0)".into(),
        ));
    }
    let p = params.p().clone();
    let witness = ShiftParams::new(p.clone(), params.N().clone(), params.D() / &p)?;
    let w = witness.clone();
    let weights = WeightSequence::from_exact(ExactSequence::from_fn(move |n| w.weight_sq(n) / &p));
    Ok(DerivedWeights { weights, witness })
}

/// `(Δγ)_{n+1} / (Δγ)_n == w_n` for `n <= n_max`; needs `N != D`.
pub fn derived_weight_identity(
    params: &ShiftParams,
    weights: &WeightSequence,
    n_max: usize,
) -> bool {
    let dg = |n: usize| params.moment(n + 1) - params.moment(n);
    (0..=n_max).all(|n| {
        let den = dg(n);
        !den.is_zero() && Some(dg(n + 1) / den) == weights.weight_sq(n)
    })
}
