//! Lazily evaluated sequences indexed from 0.
//!
//! [`ExactSequence`] memoizes rational terms. [`CertifiedSequence`] yields
//! interval enclosures at a requested precision. Both implement
//! [`RealSequence`], which is what the difference batteries consume.
//! [`LogSequence`] views a positive sequence through `s * ln(a_n)`.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{GrwsError, Result};
use crate::interval::Interval;
use crate::rational::{binomial, pow, Rational};

pub trait RealSequence: Send + Sync {
    /// The exact term, when it is rational.
    fn exact_term(&self, n: usize) -> Option<Rational>;

    /// An enclosure of the term; a point interval whenever `exact_term` is `Some`.
    fn enclose(&self, n: usize, bits: u32) -> Interval;

    /// True when every term is available exactly.
    fn is_exact(&self) -> bool;
}

type Generator = dyn Fn(usize) -> Rational + Send + Sync;

struct ExactInner {
    generate: Box<Generator>,
    cache: RwLock<Vec<Rational>>,
    len: Option<usize>,
}

/// Deterministic, memoized exact sequence. Cloning shares the cache.
#[derive(Clone)]
pub struct ExactSequence {
    inner: Arc<ExactInner>,
}

impl fmt::Debug for ExactSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cached = self.inner.cache.read().map(|c| c.len()).unwrap_or(0);
        f.debug_struct("ExactSequence")
            .field("len", &self.inner.len)
            .field("cached", &cached)
            .finish()
    }
}

impl ExactSequence {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(usize) -> Rational + Send + Sync + 'static,
    {
        Self {
            inner: Arc::new(ExactInner {
                generate: Box::new(f),
                cache: RwLock::new(Vec::new()),
                len: None,
            }),
        }
    }

    pub fn from_vec(values: Vec<Rational>) -> Self {
        let len = values.len();
        Self {
            inner: Arc::new(ExactInner {
                generate: Box::new(|n| panic!("index {n} past end of finite sequence")),
                cache: RwLock::new(values),
                len: Some(len),
            }),
        }
    }

    pub fn constant(value: Rational) -> Self {
        Self::from_fn(move |_| value.clone())
    }

    pub fn len(&self) -> Option<usize> {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == Some(0)
    }

    pub fn get(&self, n: usize) -> Option<Rational> {
        match self.inner.len {
            Some(len) if n >= len => None,
            _ => Some(self.term(n)),
        }
    }

    /// Term `n`. Panics past the end of a finite sequence.
    pub fn term(&self, n: usize) -> Rational {
        {
            let cache = self.inner.cache.read().expect("sequence cache poisoned");
            if let Some(v) = cache.get(n) {
                return v.clone();
            }
        }
        let mut cache = self.inner.cache.write().expect("sequence cache poisoned");
        // another writer may have extended the prefix meanwhile
        while cache.len() <= n {
            let i = cache.len();
            let v = (self.inner.generate)(i);
            cache.push(v);
        }
        cache[n].clone()
    }

    pub fn prefix(&self, count: usize) -> Vec<Rational> {
        (0..count).map(|n| self.term(n)).collect()
    }

    pub fn map<F>(&self, f: F) -> ExactSequence
    where
        F: Fn(usize, &ExactSequence) -> Rational + Send + Sync + 'static,
    {
        let src = self.clone();
        ExactSequence::from_fn(move |n| f(n, &src))
    }
}

impl RealSequence for ExactSequence {
    fn exact_term(&self, n: usize) -> Option<Rational> {
        Some(self.term(n))
    }

    fn enclose(&self, n: usize, _bits: u32) -> Interval {
        Interval::point(self.term(n))
    }

    fn is_exact(&self) -> bool {
        true
    }
}

type Encloser = dyn Fn(usize, u32) -> Interval + Send + Sync;

/// A sequence of reals known only through certified enclosures.
#[derive(Clone)]
pub struct CertifiedSequence {
    enclose: Arc<Encloser>,
}

impl CertifiedSequence {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(usize, u32) -> Interval + Send + Sync + 'static,
    {
        Self {
            enclose: Arc::new(f),
        }
    }
}

impl fmt::Debug for CertifiedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CertifiedSequence")
    }
}

impl RealSequence for CertifiedSequence {
    fn exact_term(&self, _n: usize) -> Option<Rational> {
        None
    }

    fn enclose(&self, n: usize, bits: u32) -> Interval {
        (self.enclose)(n, bits)
    }

    fn is_exact(&self) -> bool {
        false
    }
}

/// `(∇^n a)_k = Σ_i (-1)^i C(n,i) a_{k+i}`, exact.
pub fn nabla(seq: &ExactSequence, n: usize, k: usize) -> Rational {
    let mut acc = Rational::from_integer(BigInt::from(0));
    for i in 0..=n {
        let term = seq.term(k + i) * Rational::from_integer(binomial(n, i));
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Interval enclosure of `(∇^n a)_k`.
pub fn nabla_enclosure(seq: &dyn RealSequence, n: usize, k: usize, bits: u32) -> Interval {
    let mut acc = Interval::point(Rational::from_integer(BigInt::from(0)));
    for i in 0..=n {
        let c = Rational::from_integer(binomial(n, i));
        let t = seq.enclose(k + i, bits).scale(&c);
        acc = if i % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Exact-or-certified view of `(∇^n a)_k`.
pub fn nabla_real(seq: &dyn RealSequence, n: usize, k: usize, bits: u32) -> Interval {
    if seq.is_exact() {
        let mut acc = Rational::from_integer(BigInt::from(0));
        for i in 0..=n {
            let t = seq
                .exact_term(k + i)
                .expect("exact sequence returned no exact term")
                * Rational::from_integer(binomial(n, i));
            if i % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        Interval::point(acc)
    } else {
        nabla_enclosure(seq, n, k, bits)
    }
}

/// The termwise logarithm `s · ln a_n` of a positive sequence.
///
/// Signs of `∇^n` are decided through the multiplicative form
/// `Q = Π a_{k+i}^{(-1)^i C(n,i)}`: `sign(∇^n ln a)_k = sign(Q - 1)`.
/// That comparison is exact for rational terms and certified otherwise.
#[derive(Clone)]
pub struct LogSequence {
    source: Arc<dyn RealSequence>,
    scale: Rational,
}

impl fmt::Debug for LogSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogSequence")
            .field("scale", &self.scale)
            .field("exact", &self.source.is_exact())
            .finish()
    }
}

impl LogSequence {
    pub fn new(source: Arc<dyn RealSequence>) -> Self {
        Self::scaled(source, Rational::one())
    }

    /// `s · ln a_n`; `s` must be positive so signs match `ln a_n`.
    pub fn scaled(source: Arc<dyn RealSequence>, scale: Rational) -> Self {
        assert!(scale.is_positive(), "log scale must be positive");
        Self { source, scale }
    }

    pub fn source(&self) -> &Arc<dyn RealSequence> {
        &self.source
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn is_exact(&self) -> bool {
        self.source.is_exact()
    }

    fn positive_exact(&self, n: usize) -> Result<Rational> {
        let v = self
            .source
            .exact_term(n)
            .ok_or(GrwsError::NotExact { index: n })?;
        if !v.is_positive() {
            return Err(GrwsError::InvalidArgument(format!(
                "log of nonpositive term at index {n}"
            )));
        }
        Ok(v)
    }

    /// Certified enclosure of `s · ln a_n`.
    pub fn ln_term(&self, n: usize, bits: u32) -> Result<Interval> {
        let raw = self.source.enclose(n, bits);
        let ln = raw.ln(bits).ok_or_else(|| {
            GrwsError::InvalidArgument(format!("log of nonpositive term at index {n}"))
        })?;
        Ok(ln.scale(&self.scale))
    }

    /// Exact `(P+, P-)` with `Q = P+ / P-`; only for exact sources.
    fn exact_products(&self, n: usize, k: usize) -> Result<(Rational, Rational)> {
        let mut plus = Rational::one();
        let mut minus = Rational::one();
        for i in 0..=n {
            let e = binomial(n, i).to_u32().ok_or_else(|| {
                GrwsError::InvalidArgument(format!("difference order {n} too large"))
            })?;
            let t = pow(&self.positive_exact(k + i)?, e);
            if i % 2 == 0 {
                plus *= t;
            } else {
                minus *= t;
            }
        }
        Ok((plus, minus))
    }

    fn interval_ratio(&self, n: usize, k: usize, bits: u32) -> Result<Interval> {
        let mut q = Interval::point(Rational::one());
        for i in 0..=n {
            let e = binomial(n, i).to_i64().ok_or_else(|| {
                GrwsError::InvalidArgument(format!("difference order {n} too large"))
            })?;
            let t = self.source.enclose(k + i, bits);
            let signed = if i % 2 == 0 { e } else { -e };
            let p = t.powi(signed).ok_or_else(|| {
                GrwsError::InvalidArgument(format!("term {} not certified positive", k + i))
            })?;
            q = (&q * &p).round_out(bits + 32);
        }
        Ok(q)
    }

    /// Sign of `(∇^n s·ln a)_k`; `None` when the enclosure at `bits` straddles 0.
    pub fn nabla_sign(&self, n: usize, k: usize, bits: u32) -> Result<Option<i8>> {
        if self.is_exact() {
            let (plus, minus) = self.exact_products(n, k)?;
            return Ok(Some(match plus.cmp(&minus) {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            }));
        }
        let q = self.interval_ratio(n, k, bits)?;
        Ok(q.cmp_rational(&Rational::one()).map(|o| match o {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }))
    }

    /// Certified enclosure of the value `(∇^n s·ln a)_k`.
    pub fn nabla_value(&self, n: usize, k: usize, bits: u32) -> Result<Interval> {
        let ln_q = if self.is_exact() {
            let (plus, minus) = self.exact_products(n, k)?;
            let q = plus / minus;
            crate::interval::ln_enclosure(&q, bits)
        } else {
            let q = self.interval_ratio(n, k, bits)?;
            q.ln(bits).ok_or_else(|| {
                GrwsError::InvalidArgument("difference ratio not certified positive".into())
            })?
        };
        Ok(ln_q.scale(&self.scale))
    }
}
