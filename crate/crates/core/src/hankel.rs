//! Normalized Hankel moment windows `M(k, j)`, their determinants, and the
//! k-hyponormality decision procedure built on them.
//!
//! `M(k, j)` is `k × k` with entry `(r, s) = γ_{j+r+s} / γ_j`. Positivity of
//! `M(k, j)` for every `j` is `(k-1)`-hyponormality; public verdicts are
//! always stated as a hyponormality order, never as a matrix size.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{GrwsError, Result};
use crate::model::{MomentSequence, ShiftParams};
use crate::rational::{format_rational, lcm_denominators, pow, powi, sign, Rational};

pub const DEFAULT_K_PROBE: usize = 6;
pub const DEFAULT_J_PROBE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HankelWindow {
    k: usize,
    j: usize,
    entries: Vec<Vec<Rational>>,
}

impl HankelWindow {
    pub fn size(&self) -> usize {
        self.k
    }

    pub fn start(&self) -> usize {
        self.j
    }

    pub fn entry(&self, r: usize, s: usize) -> &Rational {
        &self.entries[r][s]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }
}

pub fn hankel(moments: &MomentSequence, k: usize, j: usize) -> Result<HankelWindow> {
    if k == 0 {
        return Err(GrwsError::InvalidArgument(
            "window size must be at least 1".into(),
        ));
    }
    let gj = moments.moment(j)?;
    let diag: Vec<Rational> = (0..2 * k - 1)
        .map(|t| moments.moment(j + t).map(|g| g / &gj))
        .collect::<Result<_>>()?;
    let entries = (0..k)
        .map(|r| (0..k).map(|s| diag[r + s].clone()).collect())
        .collect();
    Ok(HankelWindow { k, j, entries })
}

/// Fraction-free (Bareiss) determinant of a square rational matrix.
///
/// Each row is scaled to integers by the lcm of its denominators; the
/// integer determinant is divided back out at the end.
pub fn det_matrix(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            assert_eq!(row.len(), n, "matrix must be square");
            let l = lcm_denominators(row);
            scale *= &l;
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect();

    let mut negate = false;
    let mut prev = BigInt::one();
    for c in 0..n - 1 {
        if a[c][c].is_zero() {
            match (c + 1..n).find(|&r| !a[r][c].is_zero()) {
                Some(r) => {
                    a.swap(c, r);
                    negate = !negate;
                }
                None => return Rational::zero(),
            }
        }
        for r in c + 1..n {
            for s in c + 1..n {
                let v = &a[r][s] * &a[c][c] - &a[r][c] * &a[c][s];
                a[r][s] = v / &prev;
            }
        }
        prev = a[c][c].clone();
    }
    let d = a[n - 1][n - 1].clone();
    let d = if negate { -d } else { d };
    Rational::new(d, scale)
}

pub fn det_exact(window: &HankelWindow) -> Rational {
    det_matrix(&window.entries)
}

/// Closed-form `det M(k, j)` for the GRWS with the given parameters, `k >= 2`.
pub fn det_closed_form(params: &ShiftParams, k: usize, j: usize) -> Rational {
    assert!(k >= 2, "closed form needs k >= 2");
    let (p, n, d) = (params.p(), params.N(), params.D());
    let pp = |e: usize| pow(p, e as u32);
    let one = Rational::one();

    let lead_exp = (k * (k - 1) * (k - 2) / 3) as i64 + (j * k * (k - 1) / 2) as i64;
    let mut num = powi(p, lead_exp);
    for i in 0..=k - 2 {
        let e = (k - i - 1) as u32;
        num *= pow(&(&one - pp(i + 1)), e);
        num *= pow(&(n * pp(i) - d), e);
        num *= pow(&(n + pp(i + j)), e);
    }
    let mut block = one.clone();
    for l in 0..=k - 2 {
        block *= d + pp(l + j);
    }
    let mut den = pow(&block, k as u32);
    for i in 1..=k - 1 {
        den *= pow(&(d + pp(j + i + k - 2)), (k - i) as u32);
    }
    num / den
}

/// Submatrix with the listed rows and columns removed.
pub fn minor(
    rows: &[Vec<Rational>],
    drop_rows: &[usize],
    drop_cols: &[usize],
) -> Vec<Vec<Rational>> {
    rows.iter()
        .enumerate()
        .filter(|(r, _)| !drop_rows.contains(r))
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(c, _)| !drop_cols.contains(c))
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// `det A · det A^{1,n}_{1,n} = det A^1_1 · det A^n_n − det A^n_1 · det A^1_n`.
pub fn condensation_holds(rows: &[Vec<Rational>]) -> bool {
    let n = rows.len();
    if n < 2 {
        return true;
    }
    let last = n - 1;
    let lhs = det_matrix(rows) * det_matrix(&minor(rows, &[0, last], &[0, last]));
    let rhs = det_matrix(&minor(rows, &[0], &[0])) * det_matrix(&minor(rows, &[last], &[last]))
        - det_matrix(&minor(rows, &[last], &[0])) * det_matrix(&minor(rows, &[0], &[last]));
    lhs == rhs
}

/// The condensation identity written in the windows themselves:
///
/// `det M(k,j) · (α²_j α²_{j+1})^{k-2} · det M(k-2,j+2)
///   = (α²_j α²_{j+1})^{k-1} · det M(k-1,j+2) · det M(k-1,j)
///   − (α²_j)^{2(k-1)} · (det M(k-1,j+1))²`
pub fn condensation_check(params: &ShiftParams, k: usize, j: usize) -> Result<bool> {
    if k < 3 {
        return Err(GrwsError::InvalidArgument(
            "condensation needs k >= 3".into(),
        ));
    }
    let m = params.moments();
    let det = |size: usize, start: usize| -> Result<Rational> {
        Ok(det_exact(&hankel(&m, size, start)?))
    };
    let a0 = params.weight_sq(j);
    let a1 = params.weight_sq(j + 1);
    let a01 = &a0 * &a1;
    let lhs = det(k, j)? * pow(&a01, (k - 2) as u32) * det(k - 2, j + 2)?;
    let t1 = pow(&a01, (k - 1) as u32) * det(k - 1, j + 2)? * det(k - 1, j)?;
    let inner = det(k - 1, j + 1)?;
    let t2 = pow(&a0, (2 * (k - 1)) as u32) * &inner * &inner;
    Ok(lhs == t1 - t2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "bound", content = "value", rename_all = "kebab-case")]
pub enum HypoOrder {
    Exact(usize),
    AtLeast(usize),
}

impl HypoOrder {
    pub fn summary(self) -> String {
        match self {
            HypoOrder::Exact(m) => m.to_string(),
            HypoOrder::AtLeast(m) => format!(">={m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypoFailure {
    pub size: usize,
    pub j: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypoVerdict {
    pub order: HypoOrder,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<HypoFailure>,
    /// Smallest window size whose determinant vanished (flat family).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flat_from: Option<usize>,
}

/// Largest `m <= k_probe` with every `M(n, j)`, `2 <= n <= m+1`,
/// `0 <= j <= j_probe`, positive definite or flat.
///
/// A vanishing window switches that `j` to the flat path: every larger
/// window at the same `j` must vanish too, and any nonzero determinant
/// after a zero is a failure.
pub fn hyponormality_order(
    params: &ShiftParams,
    k_probe: usize,
    j_probe: usize,
) -> Result<HypoVerdict> {
    if k_probe == 0 {
        return Err(GrwsError::InvalidArgument(
            "k_probe must be at least 1".into(),
        ));
    }
    let moments = params.moments();
    let mut flat_at: Vec<Option<usize>> = vec![None; j_probe + 1];
    let mut flat_from: Option<usize> = None;
    for size in 2..=k_probe + 1 {
        for (j, flat) in flat_at.iter_mut().enumerate() {
            let d = det_exact(&hankel(&moments, size, j)?);
            let s = sign(&d);
            let failed = match (*flat, s) {
                (Some(_), 0) => false,
                (Some(_), _) => true,
                (None, 1) => false,
                (None, 0) => {
                    *flat = Some(size);
                    flat_from = Some(flat_from.map_or(size, |f: usize| f.min(size)));
                    false
                }
                (None, _) => true,
            };
            if failed {
                return Ok(HypoVerdict {
                    order: HypoOrder::Exact(size - 2),
                    first_failure: Some(HypoFailure { size, j, sign: s }),
                    flat_from,
                });
            }
        }
    }
    Ok(HypoVerdict {
        order: HypoOrder::AtLeast(k_probe),
        first_failure: None,
        flat_from,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictedOrder {
    Finite(u32),
    Infinite,
}

/// `k` with `N p^{k-1} < D < N p^k`; infinite on the rays `D = p^k N`.
pub fn sector_iv_predicted_order(params: &ShiftParams) -> Result<PredictedOrder> {
    let (p, n, d) = (params.p(), params.N(), params.D());
    if !n.is_positive() || d < n {
        return Err(GrwsError::OutsideSector(format!(
            "the closure of Sector IV (0 < N <= D): N = {}, D = {}",
            format_rational(n),
            format_rational(d)
        )));
    }
    if d == n {
        return Ok(PredictedOrder::Infinite);
    }
    let mut lower = n.clone();
    let mut k = 1u32;
    loop {
        let upper = &lower * p;
        if &upper == d {
            return Ok(PredictedOrder::Infinite);
        }
        if d < &upper {
            return Ok(PredictedOrder::Finite(k));
        }
        lower = upper;
        k += 1;
    }
}
