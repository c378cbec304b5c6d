//! Polynomials with [`LaurentSeries`] coefficients.
//!
//! [`HomogeneousPoly`] carries sections of `O(d)` on `ℙ^k` (and the two
//! components of a rational map when `k = 1`); [`UniPoly`] is the
//! dehomogenized one-variable form used for disk seminorms and Puiseux roots.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::laurent::{fmt_term, join_terms, ExtExp, LaurentSeries, RationalExp, C64};

/// Affine chart on `ℙ¹`: `z = w₀/w₁` or `u = w₁/w₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Chart {
    Z,
    InvZ,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Z => write!(f, "z"),
            Chart::InvZ => write!(f, "1/z"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, LaurentSeries>,
}

impl HomogeneousPoly {
    /// Validates that every exponent vector has `nvars` entries summing to `degree`.
    pub fn new(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, LaurentSeries)>,
    ) -> Result<Self> {
        let mut p = HomogeneousPoly::zero(nvars, degree);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::Invalid(format!(
                    "monomial {exps:?} has {} variables, expected {nvars}",
                    exps.len()
                )));
            }
            let deg: u32 = exps.iter().sum();
            if deg != degree {
                return Err(Error::Invalid(format!(
                    "inhomogeneous: monomial {exps:?} has degree {deg}, expected {degree}"
                )));
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogeneousPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: Vec<u32>, coeff: LaurentSeries) -> Self {
        let nvars = exps.len();
        let degree = exps.iter().sum();
        let mut p = Self::zero(nvars, degree);
        p.add_term(exps, coeff);
        p
    }

    /// The coordinate `w_i` as a degree-1 form.
    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, LaurentSeries::one())
    }

    fn add_term(&mut self, exps: Vec<u32>, c: LaurentSeries) {
        let entry = self.terms.entry(exps.clone());
        let merged = match entry {
            std::collections::btree_map::Entry::Occupied(o) => {
                let sum = o.get() + &c;
                o.remove();
                sum
            }
            std::collections::btree_map::Entry::Vacant(_) => c,
        };
        if !(merged.is_zero() && merged.is_exact()) {
            self.terms.insert(exps, merged);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> LaurentSeries {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// No coefficient has a known nonzero term.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    /// Smallest t-adic order among coefficients: the exponent of the Gauss norm.
    pub fn min_coeff_ord(&self) -> ExtExp {
        self.terms
            .values()
            .map(|c| c.ord())
            .fold(ExtExp::Infinite, ExtExp::min)
    }

    /// Smallest truncation order among coefficients (`None` if all exact).
    pub fn min_trunc(&self) -> Option<RationalExp> {
        self.terms.values().filter_map(|c| c.trunc_order()).min()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars || self.degree != other.degree {
            return Err(Error::Invalid(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentSeries) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut acc: BTreeMap<Vec<u32>, Vec<LaurentSeries>> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                acc.entry(e).or_default().push(ca * cb);
            }
        }
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (e, parts) in acc {
            let sum = sum_series(parts);
            if !(sum.is_zero() && sum.is_exact()) {
                out.terms.insert(e, sum);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::monomial(vec![0; self.nvars], LaurentSeries::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `∂/∂w_i`, a form of degree `d − 1`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.scale(C64::new(e[i] as f64, 0.0)));
        }
        out
    }

    /// Substitutes `w_i := subs[i]`; all substituted forms share one degree.
    pub fn compose(&self, subs: &[HomogeneousPoly]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::Invalid("composition arity mismatch".into()));
        }
        let inner_deg = subs[0].degree;
        let nv = subs[0].nvars;
        if subs.iter().any(|s| s.degree != inner_deg || s.nvars != nv) {
            return Err(Error::Invalid(
                "composition needs forms of equal degree".into(),
            ));
        }
        // cache powers of each substituted form
        let mut powers: Vec<Vec<HomogeneousPoly>> = subs
            .iter()
            .map(|s| vec![Self::monomial(vec![0; nv], LaurentSeries::one()), s.clone()])
            .collect();
        let mut out = Self::zero(nv, self.degree * inner_deg);
        for (e, c) in &self.terms {
            let mut prod = Self::monomial(vec![0; nv], c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                prod = prod.mul(&powers[i][k as usize]);
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Evaluates at complex coordinates, with coefficients evaluated at `t`
    /// (principal branch for ramified coefficients).
    pub fn eval(&self, z: &[C64], t: C64) -> Result<C64> {
        let mut acc = C64::zero();
        for (e, c) in &self.terms {
            let mut m = c.eval_principal(t)?;
            for (zi, &k) in z.iter().zip(e) {
                if k > 0 {
                    m *= zi.powu(k);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Coefficients of a binary form, index `j` ↦ coefficient of `w₀^j w₁^{d−j}`.
    pub fn binary_coeffs(&self) -> Result<Vec<LaurentSeries>> {
        if self.nvars != 2 {
            return Err(Error::Invalid("binary form expected (k = 1)".into()));
        }
        let d = self.degree as usize;
        let mut out = vec![LaurentSeries::zero(); d + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_binary(coeffs: &[LaurentSeries]) -> Self {
        let d = coeffs.len() as u32 - 1;
        let mut p = Self::zero(2, d);
        for (j, c) in coeffs.iter().enumerate() {
            p.add_term(vec![j as u32, d - j as u32], c.clone());
        }
        p
    }

    /// One-variable form in the given chart: `P(z, 1)` or `P(1, u)`.
    pub fn dehomogenize(&self, chart: Chart) -> Result<UniPoly> {
        let mut c = self.binary_coeffs()?;
        if chart == Chart::InvZ {
            c.reverse();
        }
        Ok(UniPoly::new(c))
    }

    /// Complex coefficients of a binary form at parameter `t`.
    pub fn binary_coeffs_at(&self, t: C64) -> Result<Vec<C64>> {
        self.binary_coeffs()?
            .iter()
            .map(|c| c.eval_principal(t))
            .collect()
    }

    pub fn max_ramification(&self) -> u32 {
        self.terms
            .values()
            .map(|c| c.ramification())
            .max()
            .unwrap_or(1)
    }
}

impl fmt::Display for HomogeneousPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        // highest power of w0 first reads naturally for binary forms
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("w{i}")
                    } else {
                        format!("w{i}^{k}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            if c.num_terms() == 1 && c.is_exact() {
                let (q, coeff) = c.leading().unwrap();
                let var = if q.is_zero() {
                    mono.clone()
                } else {
                    let tp = if q == RationalExp::from_integer(1) {
                        "t".to_string()
                    } else {
                        format!("t^{}", crate::laurent::fmt_exponent(q))
                    };
                    if mono.is_empty() {
                        tp
                    } else {
                        format!("{tp}*{mono}")
                    }
                };
                parts.push(fmt_term(coeff, &var));
            } else if mono.is_empty() {
                parts.push((false, format!("({c})")));
            } else {
                parts.push((false, format!("({c})*{mono}")));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", join_terms(parts))
    }
}

/// Sums series pairwise to keep magnitudes balanced.
pub(crate) fn sum_series(mut parts: Vec<LaurentSeries>) -> LaurentSeries {
    if parts.is_empty() {
        return LaurentSeries::zero();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap()
}

/// One-variable polynomial with series coefficients, `coeffs[j]` ↦ `x^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<LaurentSeries>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<LaurentSeries>) -> Self {
        while coeffs.len() > 1 {
            let last = coeffs.last().unwrap();
            if last.is_zero() && last.is_exact() {
                coeffs.pop();
            } else {
                break;
            }
        }
        if coeffs.is_empty() {
            coeffs.push(LaurentSeries::zero());
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: LaurentSeries) -> Self {
        UniPoly { coeffs: vec![c] }
    }

    /// The variable `x`.
    pub fn x() -> Self {
        UniPoly::new(vec![LaurentSeries::zero(), LaurentSeries::one()])
    }

    pub fn coeffs(&self) -> &[LaurentSeries] {
        &self.coeffs
    }

    /// Formal degree (index of the last stored coefficient).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = LaurentSeries::zero();
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        UniPoly::new(c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &LaurentSeries) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut parts: Vec<Vec<LaurentSeries>> = vec![Vec::new(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.is_exact() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() && b.is_exact() {
                    continue;
                }
                parts[i + j].push(a * b);
            }
        }
        UniPoly::new(parts.into_iter().map(sum_series).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = UniPoly::constant(LaurentSeries::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::constant(LaurentSeries::zero());
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(C64::new(j as f64, 0.0)))
                .collect(),
        )
    }

    /// `self(inner(x))` by Horner's rule.
    pub fn compose(&self, inner: &UniPoly) -> Self {
        let mut acc = UniPoly::constant(self.coeffs.last().unwrap().clone());
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(inner).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    pub fn eval_series(&self, x: &LaurentSeries) -> LaurentSeries {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Coefficients of `u ↦ self(a + u)`.
    pub fn taylor_shift(&self, a: &LaurentSeries) -> Self {
        if a.is_zero() && a.is_exact() {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let add = &c[j + 1] * a;
                c[j] = &c[j] + &add;
            }
        }
        UniPoly::new(c)
    }

    /// Complex coefficients at a parameter value `t` (principal branch).
    pub fn coeffs_at(&self, t: C64) -> Result<Vec<C64>> {
        self.coeffs.iter().map(|c| c.eval_principal(t)).collect()
    }
}
