use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::exp::{rat, ExtExp, RationalExp};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Coefficients whose modulus falls below this fraction of the magnitude of
/// the contributions that produced them are treated as exact cancellation.
pub(crate) const CANCEL_TOL: f64 = 1e-10;

/// Largest exponent span for which products accumulate into a dense buffer.
const DENSE_SPAN: i64 = 1 << 16;

/// Truncated Puiseux/Laurent series `Σ c_k t^{k/e}` with complex coefficients.
///
/// Exponents are exact (`k/e` with a single ramification index `e`), and the
/// series knows the first exponent it no longer represents (`trunc`), or is
/// exact when `trunc` is `None`. Stored coefficients are nonzero and sorted
/// by exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    ram: u32,
    terms: Vec<(i64, C64)>,
    trunc: Option<RationalExp>,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        LaurentSeries {
            ram: 1,
            terms: Vec::new(),
            trunc: None,
        }
    }

    /// The zero series known only up to `O(t^order)`.
    pub fn big_o(order: RationalExp) -> Self {
        LaurentSeries {
            ram: 1,
            terms: Vec::new(),
            trunc: Some(order),
        }
    }

    pub fn one() -> Self {
        Self::constant(C64::one())
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(c, RationalExp::zero())
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    /// The uniformizer `t`.
    pub fn t() -> Self {
        Self::monomial(C64::one(), RationalExp::one())
    }

    pub fn monomial(c: C64, exponent: RationalExp) -> Self {
        Self::from_terms([(exponent, c)], None)
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and terms at or beyond `trunc` are dropped.
    pub fn from_terms<I>(terms: I, trunc: Option<RationalExp>) -> Self
    where
        I: IntoIterator<Item = (RationalExp, C64)>,
    {
        let terms: Vec<(RationalExp, C64)> = terms.into_iter().collect();
        let ram = terms
            .iter()
            .fold(1i64, |acc, (q, _)| acc.lcm(q.denom()))
            .max(1) as u32;
        let mut map: BTreeMap<i64, C64> = BTreeMap::new();
        for (q, c) in terms {
            let k = q.numer() * (ram as i64 / q.denom());
            *map.entry(k).or_insert_with(C64::zero) += c;
        }
        let mut s = LaurentSeries {
            ram,
            terms: map.into_iter().collect(),
            trunc,
        };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        if let Some(tr) = self.trunc {
            let ram = self.ram as i128;
            let (p, q) = (*tr.numer() as i128, *tr.denom() as i128);
            // keep k/ram < p/q  <=>  k*q < p*ram
            self.terms.retain(|(k, _)| (*k as i128) * q < p * ram);
        }
        self.terms
            .retain(|(_, c)| *c != C64::zero() && c.is_finite());
        let mut g = self.ram as i64;
        for (k, _) in &self.terms {
            g = g.gcd(k);
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            for (k, _) in &mut self.terms {
                *k /= g;
            }
            self.ram = (self.ram as i64 / g) as u32;
        }
        if self.terms.is_empty() {
            self.ram = 1;
        }
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn trunc_order(&self) -> Option<RationalExp> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// No known nonzero terms (exact zero or `O(t^T)`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn exp_of(&self, k: i64) -> RationalExp {
        rat(k, self.ram as i64)
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (RationalExp, C64)> + '_ {
        self.terms.iter().map(move |(k, c)| (self.exp_of(*k), *c))
    }

    pub fn coeff(&self, exponent: RationalExp) -> C64 {
        self.terms()
            .find(|(q, _)| *q == exponent)
            .map(|(_, c)| c)
            .unwrap_or_else(C64::zero)
    }

    /// t-adic order: the smallest stored exponent; for a zero series the
    /// truncation order (`+∞` when exact).
    pub fn ord(&self) -> ExtExp {
        match self.terms.first() {
            Some((k, _)) => ExtExp::Finite(self.exp_of(*k)),
            None => self.trunc.into(),
        }
    }

    pub fn leading(&self) -> Option<(RationalExp, C64)> {
        self.terms.first().map(|(k, c)| (self.exp_of(*k), *c))
    }

    /// `|a|_r = r^{ord a}`, and 0 for a series without known terms.
    pub fn norm_r(&self, r: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.ord().power_of(r)
        }
    }

    fn rescaled(&self, ram: u32) -> impl Iterator<Item = (i64, C64)> + '_ {
        let f = (ram / self.ram) as i64;
        self.terms.iter().map(move |(k, c)| (k * f, *c))
    }

    fn trunc_ext(&self) -> ExtExp {
        self.trunc.into()
    }

    /// Drops everything at or beyond `order`.
    pub fn truncated(&self, order: RationalExp) -> Self {
        let trunc = match self.trunc {
            Some(t) if t <= order => t,
            _ => order,
        };
        let mut s = LaurentSeries {
            ram: self.ram,
            terms: self.terms.clone(),
            trunc: Some(trunc),
        };
        s.canonicalize();
        s
    }

    /// The same known terms, reinterpreted as an exact series.
    pub fn exact_part(&self) -> Self {
        LaurentSeries {
            ram: self.ram,
            terms: self.terms.clone(),
            trunc: None,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::zero() {
            return match self.trunc {
                None => Self::zero(),
                Some(_) => LaurentSeries::big_o(match self.ord() {
                    ExtExp::Finite(q) => q,
                    ExtExp::Infinite => unreachable!("truncated series has finite order"),
                }),
            };
        }
        let mut s = self.clone();
        for (_, x) in &mut s.terms {
            *x *= c;
        }
        s.canonicalize();
        s
    }

    /// Multiplication by `t^q`.
    pub fn shift(&self, q: RationalExp) -> Self {
        let ram = (self.ram as i64).lcm(q.denom()) as u32;
        let dk = q.numer() * (ram as i64 / q.denom());
        let mut s = LaurentSeries {
            ram,
            terms: self.rescaled(ram).map(|(k, c)| (k + dk, c)).collect(),
            trunc: self.trunc.map(|t| t + q),
        };
        s.canonicalize();
        s
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let ram = (self.ram as i64).lcm(&(other.ram as i64)) as u32;
        let mut out: Vec<(i64, C64)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.rescaled(ram).peekable();
        let mut b = other.rescaled(ram).peekable();
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (Some((ka, ca)), Some((kb, cb))) => {
                    if ka < kb {
                        out.push((ka, ca));
                        a.next();
                    } else if kb < ka {
                        out.push((kb, cb));
                        b.next();
                    } else {
                        let sum = ca + cb;
                        if sum.norm() > CANCEL_TOL * (ca.norm() + cb.norm()) {
                            out.push((ka, sum));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        let trunc = match (self.trunc, other.trunc) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        let mut s = LaurentSeries {
            ram,
            terms: out,
            trunc,
        };
        s.canonicalize();
        s
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        // min(ord a + trunc b, ord b + trunc a)
        let trunc = (self.ord() + other.trunc_ext()).min(other.ord() + self.trunc_ext());
        if self.is_zero() || other.is_zero() {
            return match trunc {
                ExtExp::Infinite => Self::zero(),
                ExtExp::Finite(q) => Self::big_o(q),
            };
        }
        let ram = (self.ram as i64).lcm(&(other.ram as i64)) as u32;
        let a: Vec<(i64, C64)> = self.rescaled(ram).collect();
        let b: Vec<(i64, C64)> = other.rescaled(ram).collect();
        let kmin = a[0].0 + b[0].0;
        let kmax = a[a.len() - 1].0 + b[b.len() - 1].0;
        let limit = match trunc {
            // exclusive bound on k: k*den < num*ram
            ExtExp::Finite(q) => Some((*q.numer() as i128, *q.denom() as i128)),
            ExtExp::Infinite => None,
        };
        let keep = |k: i64| match limit {
            Some((p, q)) => (k as i128) * q < p * ram as i128,
            None => true,
        };
        let mut out = Vec::new();
        if kmax - kmin < DENSE_SPAN {
            let n = (kmax - kmin + 1) as usize;
            let mut acc = vec![C64::zero(); n];
            let mut mag = vec![0.0f64; n];
            for &(ka, ca) in &a {
                for &(kb, cb) in &b {
                    let k = ka + kb;
                    if !keep(k) {
                        continue;
                    }
                    let p = ca * cb;
                    let idx = (k - kmin) as usize;
                    acc[idx] += p;
                    mag[idx] += p.norm();
                }
            }
            for (i, (c, m)) in acc.into_iter().zip(mag).enumerate() {
                if m > 0.0 && c.norm() > CANCEL_TOL * m {
                    out.push((kmin + i as i64, c));
                }
            }
        } else {
            let mut acc: BTreeMap<i64, (C64, f64)> = BTreeMap::new();
            for &(ka, ca) in &a {
                for &(kb, cb) in &b {
                    let k = ka + kb;
                    if !keep(k) {
                        continue;
                    }
                    let p = ca * cb;
                    let e = acc.entry(k).or_insert((C64::zero(), 0.0));
                    e.0 += p;
                    e.1 += p.norm();
                }
            }
            for (k, (c, m)) in acc {
                if c.norm() > CANCEL_TOL * m {
                    out.push((k, c));
                }
            }
        }
        let mut s = LaurentSeries {
            ram,
            terms: out,
            trunc: trunc.finite(),
        };
        s.canonicalize();
        s
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_series(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_series(&base);
            }
        }
        result
    }

    /// Multiplicative inverse, computed up to (but excluding) exponent `order`
    /// or the precision carried by `self`, whichever is smaller.
    ///
    /// Single-term exact series invert exactly.
    pub fn inv_to(&self, order: RationalExp) -> Result<Self> {
        let (v, lead) = self
            .leading()
            .ok_or_else(|| Error::Domain("inverse of a zero series".into()))?;
        if self.is_exact() && self.terms.len() == 1 {
            return Ok(Self::monomial(lead.inv(), -v));
        }
        // relative precision of self gives absolute precision of the inverse
        let mut cap = order;
        if let Some(t) = self.trunc {
            cap = cap.min(t - v - v);
        }
        let e = self.ram as i64;
        let base_k = self.terms[0].0;
        // number of 1/e-steps from -v up to cap
        let steps = ((cap + v) * e).ceil().to_integer();
        if steps <= 0 {
            return Ok(Self::big_o(cap));
        }
        let steps = steps as usize;
        let rel: Vec<C64> = {
            let mut r = vec![C64::zero(); steps];
            for (k, c) in &self.terms {
                let idx = (k - base_k) as usize;
                if idx < steps {
                    r[idx] = *c;
                }
            }
            r
        };
        let inv_lead = lead.inv();
        let mut b = vec![C64::zero(); steps];
        b[0] = inv_lead;
        for n in 1..steps {
            let mut acc = C64::zero();
            for j in 1..=n {
                if rel[j] != C64::zero() {
                    acc += rel[j] * b[n - j];
                }
            }
            b[n] = -inv_lead * acc;
        }
        let terms = b
            .into_iter()
            .enumerate()
            .map(|(i, c)| (rat(-base_k + i as i64, e), c));
        Ok(Self::from_terms(terms, Some(cap)))
    }

    /// `self / other` with the quotient computed below exponent `order`.
    pub fn div_to(&self, other: &Self, order: RationalExp) -> Result<Self> {
        let shift = match self.ord() {
            ExtExp::Finite(q) => q,
            ExtExp::Infinite => return Ok(Self::zero()),
        };
        let inv = other.inv_to(order - shift)?;
        Ok(self.mul_series(&inv))
    }

    /// Evaluates at a complex `t` for an unramified series.
    pub fn eval(&self, t: C64) -> Result<C64> {
        if self.ram != 1 {
            return Err(Error::Domain(format!(
                "series has ramification {}; supply a branch of t^(1/{})",
                self.ram, self.ram
            )));
        }
        self.eval_branch(t)
    }

    /// Evaluates `Σ c_k s^k` where `s` is a chosen branch of `t^{1/e}`.
    pub fn eval_branch(&self, s: C64) -> Result<C64> {
        if s == C64::zero() {
            if self.terms.iter().any(|(k, _)| *k < 0) {
                return Err(Error::Domain("pole at t = 0".into()));
            }
            return Ok(self
                .terms
                .iter()
                .find(|(k, _)| *k == 0)
                .map(|(_, c)| *c)
                .unwrap_or_else(C64::zero));
        }
        let mut acc = C64::zero();
        for (k, c) in &self.terms {
            acc += c * s.powi(*k as i32);
        }
        Ok(acc)
    }

    /// Evaluation at `t` using the principal branch of `t^{1/e}`.
    pub fn eval_principal(&self, t: C64) -> Result<C64> {
        if self.ram == 1 {
            return self.eval(t);
        }
        if t == C64::zero() {
            return self.eval_branch(t);
        }
        self.eval_branch(t.powf(1.0 / self.ram as f64))
    }

    /// Largest coefficient modulus (0 for a zero series).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Structural comparison allowing a relative tolerance on coefficients.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.trunc != other.trunc {
            return false;
        }
        let d = self.add_series(&other.scale(-C64::one()));
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1.0);
        d.terms.iter().all(|(_, c)| c.norm() <= tol * scale)
    }
}

impl Default for LaurentSeries {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<C64> for LaurentSeries {
    fn from(c: C64) -> Self {
        LaurentSeries::constant(c)
    }
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        self.add_series(rhs)
    }
}

impl Add for LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: LaurentSeries) -> LaurentSeries {
        self.add_series(&rhs)
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        self.add_series(&-rhs)
    }
}

impl Sub for LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: LaurentSeries) -> LaurentSeries {
        &self - &rhs
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        self.mul_series(rhs)
    }
}

impl Mul for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: LaurentSeries) -> LaurentSeries {
        self.mul_series(&rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        let mut s = self.clone();
        for (_, c) in &mut s.terms {
            *c = -*c;
        }
        s
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

pub(crate) fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("({}-{}i)", c.re, -c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

pub(crate) fn fmt_exponent(q: RationalExp) -> String {
    if q.denom() == &1 {
        format!("{}", q.numer())
    } else {
        format!("({}/{})", q.numer(), q.denom())
    }
}

/// Formats `c * var^q` as a signed term; returns (is_negative, body).
pub(crate) fn fmt_term(c: C64, var_part: &str) -> (bool, String) {
    let (neg, mag) = if c.im == 0.0 && c.re < 0.0 {
        (true, C64::new(-c.re, 0.0))
    } else {
        (false, c)
    };
    let body = if var_part.is_empty() {
        fmt_complex(mag)
    } else if mag == C64::one() {
        var_part.to_string()
    } else {
        format!("{}*{}", fmt_complex(mag), var_part)
    };
    (neg, body)
}

pub(crate) fn join_terms(parts: Vec<(bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = self
            .terms()
            .map(|(q, c)| {
                let var = if q.is_zero() {
                    String::new()
                } else if q.is_one() {
                    "t".to_string()
                } else {
                    format!("t^{}", fmt_exponent(q))
                };
                fmt_term(c, &var)
            })
            .collect();
        if let Some(tr) = self.trunc {
            parts.push((false, format!("O(t^{})", fmt_exponent(tr))));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", join_terms(parts))
    }
}

impl std::str::FromStr for LaurentSeries {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::parser::parse_series(s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::exp::int;
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn tpow(k: i64) -> LaurentSeries {
        LaurentSeries::monomial(c(1.0), int(k))
    }

    #[test]
    fn add_cancels_pole() {
        let a = &tpow(-1) + &LaurentSeries::one();
        let b = -tpow(-1);
        assert_eq!(&a + &b, LaurentSeries::one());
    }

    #[test]
    fn zero_is_additive_identity() {
        let f =
            LaurentSeries::from_terms([(int(-2), c(3.0)), (rat(1, 2), C64::new(0.0, 1.0))], None);
        assert_eq!(&LaurentSeries::zero() + &f, f);
    }

    #[test]
    fn like_terms_combine() {
        let a = LaurentSeries::monomial(c(1.0), int(2));
        let b = LaurentSeries::monomial(c(3.0), int(2));
        assert_eq!(&a + &b, LaurentSeries::monomial(c(4.0), int(2)));
    }

    #[test]
    fn products() {
        assert_eq!(&LaurentSeries::t() * &tpow(-1), LaurentSeries::one());
        let p = &(&LaurentSeries::one() + &LaurentSeries::t())
            * &(&LaurentSeries::one() - &LaurentSeries::t());
        assert_eq!(p, &LaurentSeries::one() - &tpow(2));
    }

    #[test]
    fn zero_times_truncated_keeps_precision() {
        let f = LaurentSeries::from_terms([(int(1), c(2.0))], Some(int(5)));
        let z = LaurentSeries::big_o(int(3));
        let p = &z * &f;
        assert!(p.is_zero());
        // ord(0)+trunc(f) = 8, ord(f)+trunc(0) = 4
        assert_eq!(p.trunc_order(), Some(int(4)));
        assert_eq!(&LaurentSeries::zero() * &f, LaurentSeries::zero());
    }

    #[test]
    fn product_truncation() {
        let a = LaurentSeries::from_terms([(int(0), c(1.0)), (int(1), c(1.0))], Some(int(3)));
        let b = LaurentSeries::from_terms([(int(-1), c(1.0))], Some(int(2)));
        let p = &a * &b;
        // min(0 + 2, -1 + 3) = 2
        assert_eq!(p.trunc_order(), Some(int(2)));
        assert_eq!(p.coeff(int(-1)), c(1.0));
        assert_eq!(p.coeff(int(0)), c(1.0));
    }

    #[test]
    fn orders() {
        let f = LaurentSeries::from_terms([(int(2), c(1.0)), (int(5), c(3.0))], None);
        assert_eq!(f.ord(), ExtExp::Finite(int(2)));
        let g = LaurentSeries::from_terms([(int(-1), c(5.0)), (int(0), c(1.0))], None);
        assert_eq!(g.ord(), ExtExp::Finite(int(-1)));
        assert_eq!(LaurentSeries::real(2.0).ord(), ExtExp::ZERO);
        assert_eq!(LaurentSeries::zero().ord(), ExtExp::Infinite);
        assert_eq!(LaurentSeries::big_o(int(4)).ord(), ExtExp::Finite(int(4)));
    }

    #[test]
    fn evaluation() {
        let f = tpow(-1);
        assert!((f.eval(c(0.1)).unwrap() - c(10.0)).norm() < 1e-12);
        let g = &LaurentSeries::one() + &LaurentSeries::t();
        assert!((g.eval(c(0.5)).unwrap() - c(1.5)).norm() < 1e-15);
        let k = LaurentSeries::constant(C64::new(2.0, -1.0));
        assert_eq!(k.eval(C64::new(0.3, 0.7)).unwrap(), C64::new(2.0, -1.0));
        assert_eq!(k.eval(C64::zero()).unwrap(), C64::new(2.0, -1.0));
        assert!(matches!(f.eval(C64::zero()), Err(Error::Domain(_))));
        let ramified = LaurentSeries::monomial(c(1.0), rat(1, 2));
        assert!(ramified.eval(c(4.0)).is_err());
        assert!((ramified.eval_branch(c(2.0)).unwrap() - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn r_norms() {
        assert_eq!(LaurentSeries::t().norm_r(0.5), 0.5);
        assert_eq!(tpow(-2).norm_r(0.5), 4.0);
        assert_eq!(LaurentSeries::real(7.0).norm_r(0.5), 1.0);
        assert_eq!(LaurentSeries::zero().norm_r(0.5), 0.0);
    }

    #[test]
    fn ramification_unifies_and_reduces() {
        let a = LaurentSeries::monomial(c(1.0), rat(1, 2));
        let b = LaurentSeries::monomial(c(1.0), rat(1, 3));
        let s = &a + &b;
        assert_eq!(s.ramification(), 6);
        let sq = &a * &a;
        assert_eq!(sq, LaurentSeries::t());
        assert_eq!(sq.ramification(), 1);
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let f = &LaurentSeries::one() + &LaurentSeries::t();
        let inv = f.inv_to(int(6)).unwrap();
        for k in 0..6 {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(inv.coeff(int(k)), c(expected));
        }
        assert_eq!(inv.trunc_order(), Some(int(6)));
        let prod = &f * &inv;
        assert!(prod.approx_eq(&LaurentSeries::one().truncated(int(6)), 1e-14));
    }

    #[test]
    fn inverse_of_monomial_is_exact() {
        let f = LaurentSeries::monomial(C64::new(0.0, 2.0), rat(-1, 2));
        let inv = f.inv_to(int(0)).unwrap();
        assert!(inv.is_exact());
        assert_eq!(&f * &inv, LaurentSeries::one());
    }

    #[test]
    fn display_format() {
        let f = LaurentSeries::from_terms([(int(-1), c(3.0)), (int(2), C64::new(1.0, 2.0))], None);
        assert_eq!(f.to_string(), "3*t^-1 + (1+2i)*t^2");
        let g = LaurentSeries::from_terms([(rat(1, 2), c(-1.0))], Some(int(3)));
        assert_eq!(g.to_string(), "-t^(1/2) + O(t^3)");
        assert_eq!(LaurentSeries::zero().to_string(), "0");
    }

    #[test]
    fn numerical_cancellation_is_dropped() {
        let a = LaurentSeries::from_terms([(int(0), c(0.1)), (int(1), c(1.0))], None);
        let b = LaurentSeries::from_terms([(int(0), c(-0.1 + 1e-17)), (int(1), c(1.0))], None);
        let s = &a + &b;
        assert_eq!(s.ord(), ExtExp::Finite(int(1)));
    }
}
