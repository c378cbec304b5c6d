//! Evaluation of parsed expressions into polynomials (or quotients of
//! polynomials) in named variables with series coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::syntax::Expr;
use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, RationalExp, C64};

/// Sparse polynomial over a fixed variable list.
#[derive(Clone, Debug)]
pub(crate) struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, LaurentSeries>,
}

impl Poly {
    fn constant(nvars: usize, c: LaurentSeries) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; nvars], c);
        Poly { nvars, terms }.canonical()
    }

    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, LaurentSeries::one());
        Poly { nvars, terms }
    }

    fn canonical(mut self) -> Self {
        self.terms.retain(|_, c| !(c.is_zero() && c.is_exact()));
        self
    }

    /// The coefficient series when the polynomial involves no variable.
    pub fn as_constant(&self) -> Option<LaurentSeries> {
        match self.terms.len() {
            0 => Some(LaurentSeries::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn is_one(&self) -> bool {
        self.as_constant()
            .map(|c| c.is_exact() && c == LaurentSeries::one())
            .unwrap_or(false)
    }

    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let merged = match terms.remove(e) {
                Some(a) => &a + c,
                None => c.clone(),
            };
            terms.insert(e.clone(), merged);
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
        .canonical()
    }

    fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Poly {
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let p = ca * cb;
                let merged = match out.terms.remove(&e) {
                    Some(a) => &a + &p,
                    None => p,
                };
                out.terms.insert(e, merged);
            }
        }
        out.canonical()
    }

    fn scale(&self, c: &LaurentSeries) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
        .canonical()
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::constant(self.nvars, LaurentSeries::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Total degrees of the stored monomials, as (min, max).
    pub fn degree_range(&self) -> Option<(u32, u32)> {
        let degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        degs.fold(None, |acc, d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        })
    }
}

/// A quotient `num / den`; `den` stays 1 unless division by variables is allowed.
#[derive(Clone, Debug)]
pub(crate) struct Value {
    pub num: Poly,
    pub den: Poly,
}

pub(crate) struct Context<'a> {
    pub vars: &'a [&'a str],
    /// Permit quotients by polynomials in the variables (rational-map mode).
    pub allow_var_division: bool,
    /// Relative order to which non-monomial series denominators are expanded.
    pub precision: RationalExp,
}

impl Context<'_> {
    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn constant(&self, c: LaurentSeries) -> Value {
        Value {
            num: Poly::constant(self.nvars(), c),
            den: Poly::constant(self.nvars(), LaurentSeries::one()),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Num(c) => Ok(self.constant(LaurentSeries::constant(*c))),
            Expr::Var(name, at) => {
                if name == "t" {
                    return Ok(self.constant(LaurentSeries::t()));
                }
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Value {
                        num: Poly::var(self.nvars(), i),
                        den: Poly::constant(self.nvars(), LaurentSeries::one()),
                    }),
                    None => Err(Error::parse(*at, format!("unknown variable '{name}'"))),
                }
            }
            Expr::Add(a, b) => Ok(self.add(&self.eval(a)?, &self.eval(b)?)),
            Expr::Sub(a, b) => {
                let b = self.eval(b)?;
                Ok(self.add(
                    &self.eval(a)?,
                    &Value {
                        num: b.num.neg(),
                        den: b.den,
                    },
                ))
            }
            Expr::Neg(a) => {
                let a = self.eval(a)?;
                Ok(Value {
                    num: a.num.neg(),
                    den: a.den,
                })
            }
            Expr::Mul(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                Ok(Value {
                    num: a.num.mul(&b.num),
                    den: a.den.mul(&b.den),
                })
            }
            Expr::Div(a, b, at) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.div(&a, &b, *at)
            }
            Expr::Pow(base, q, at) => self.pow(base, *q, *at),
            Expr::BigO(inner, at) => {
                let v = self.eval(inner)?;
                let c = self.pure_series(&v);
                match c {
                    Some(c) if c.is_exact() && c.num_terms() == 1 => {
                        let (q, _) = c.leading().unwrap();
                        Ok(self.constant(LaurentSeries::big_o(q)))
                    }
                    _ => Err(Error::parse(*at, "O(...) must enclose a power of t")),
                }
            }
        }
    }

    fn pure_series(&self, v: &Value) -> Option<LaurentSeries> {
        if v.den.is_one() {
            v.num.as_constant()
        } else {
            None
        }
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        if a.den.is_one() && b.den.is_one() {
            return Value {
                num: a.num.add(&b.num),
                den: a.den.clone(),
            };
        }
        Value {
            num: a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            den: a.den.mul(&b.den),
        }
    }

    fn invert_series(&self, c: &LaurentSeries, at: usize) -> Result<LaurentSeries> {
        let v = match c.ord() {
            ExtExp::Finite(v) if !c.is_zero() => v,
            _ => return Err(Error::parse(at, "division by zero")),
        };
        c.inv_to(-v + self.precision)
    }

    fn div(&self, a: &Value, b: &Value, at: usize) -> Result<Value> {
        if b.den.is_one() {
            if let Some(s) = b.num.as_constant() {
                let inv = self.invert_series(&s, at)?;
                return Ok(Value {
                    num: a.num.scale(&inv),
                    den: a.den.clone(),
                });
            }
        }
        if !self.allow_var_division {
            return Err(Error::parse(
                at,
                "division by an expression in the variables is not allowed here",
            ));
        }
        if b.num.terms.is_empty() {
            return Err(Error::parse(at, "division by zero"));
        }
        Ok(Value {
            num: a.num.mul(&b.den),
            den: a.den.mul(&b.num),
        })
    }

    fn pow(&self, base: &Expr, q: RationalExp, at: usize) -> Result<Value> {
        if let Expr::Var(name, _) = base {
            if name == "t" {
                return Ok(self.constant(LaurentSeries::monomial(C64::one(), q)));
            }
        }
        if !q.is_integer() {
            return Err(Error::parse(
                at,
                "fractional exponents are only allowed on t",
            ));
        }
        let n = *q.numer();
        let b = self.eval(base)?;
        if n.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::parse(at, "exponent too large"));
        }
        let m = n.unsigned_abs() as u32;
        let powered = Value {
            num: b.num.pow(m),
            den: b.den.pow(m),
        };
        if n >= 0 {
            return Ok(powered);
        }
        let one = self.constant(LaurentSeries::one());
        if q.is_zero() {
            return Ok(one);
        }
        self.div(&one, &powered, at)
    }
}
