//! Text ingestion for series, families of rational maps and admissible data.
//!
//! # Grammar
//!
//! Expressions use `+ - * / ^`, parentheses, real literals (`2`, `0.5`,
//! `1e-3`), imaginary literals (`2i`, `i`) and the parameter `t`. Complex
//! constants are written with parentheses, e.g. `(1+2i)*t^2`.
//!
//! * Integer powers are written `x^3` or `x^-2`; `t` also accepts fractional
//!   powers `t^(1/2)`, `t^(-3/2)`.
//! * `O(t^k)` adds a truncation term: everything from `t^k` on is unknown.
//! * Dividing by a series that is not a single power of `t` expands the
//!   quotient to a fixed relative order (see [`SERIES_PRECISION`]).
//!
//! Families are given either as a rational function of `z`, e.g.
//! `"(z^2 - t)/z"`, or as a homogeneous pair `"[w0^2 - t*w1^2 : w0*w1]"`.
//! The pair form is what [`RationalMapFamily`]'s `Display` emits, so
//! printed families parse back to the same structure. Sections of admissible
//! data are homogeneous polynomials in `w0, …, wk`.

mod eval;
mod syntax;

use std::fmt;

use crate::admissible::AdmissibleDatum;
use crate::error::{Error, Result};
use crate::laurent::{int, LaurentSeries, RationalExp};
use crate::poly::HomogeneousPoly;
use eval::{Context, Poly, Value};
use syntax::{Expr, Parser, Tok};

/// Relative order to which non-monomial series denominators are expanded.
pub const SERIES_PRECISION: i64 = 16;

fn precision() -> RationalExp {
    int(SERIES_PRECISION)
}

/// A meromorphic family `R_t = [P0 : P1]` of degree-`d` maps of `ℙ¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMapFamily {
    pub degree: u32,
    pub p0: HomogeneousPoly,
    pub p1: HomogeneousPoly,
    pub label: String,
}

impl RationalMapFamily {
    /// Checks that both components are binary forms of one degree `d ≥ 2`.
    ///
    /// Does not check the resultant; [`parse_family`] does.
    pub fn new(p0: HomogeneousPoly, p1: HomogeneousPoly, label: impl Into<String>) -> Result<Self> {
        if p0.nvars() != 2 || p1.nvars() != 2 {
            return Err(Error::Invalid(
                "family components must be binary forms".into(),
            ));
        }
        if p0.degree() != p1.degree() {
            return Err(Error::Invalid(format!(
                "components have degrees {} and {}",
                p0.degree(),
                p1.degree()
            )));
        }
        let degree = p0.degree();
        if degree < 2 {
            return Err(Error::Invalid(format!("degree {degree} < 2")));
        }
        Ok(RationalMapFamily {
            degree,
            p0,
            p1,
            label: label.into(),
        })
    }

    pub fn components(&self) -> [&HomogeneousPoly; 2] {
        [&self.p0, &self.p1]
    }

    /// `P1 = c·w1^d` with `c` a nonzero series: the family is polynomial in `z`.
    pub fn is_polynomial(&self) -> bool {
        let d = self.degree;
        self.p1.terms().all(|(e, _)| e[0] == 0) && !self.p1.coeff(&[0, d]).is_zero()
    }

    /// Same map, lift multiplied by the series `h`.
    pub fn twisted(&self, h: &LaurentSeries) -> Self {
        RationalMapFamily {
            degree: self.degree,
            p0: self.p0.scale(h),
            p1: self.p1.scale(h),
            label: format!("({h})*{}", self.label),
        }
    }
}

impl fmt::Display for RationalMapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.p0, self.p1)
    }
}

fn parse_complete(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a series in `t`, e.g. `"3*t^-1 + (1+2i)*t^2 + O(t^4)"`.
pub fn parse_series(text: &str) -> Result<LaurentSeries> {
    let e = parse_complete(text)?;
    let ctx = Context {
        vars: &[],
        allow_var_division: false,
        precision: precision(),
    };
    let v = ctx.eval(&e)?;
    Ok(v.num.as_constant().expect("no variables in series mode"))
}

fn to_homogeneous(p: &Poly, expected: Option<u32>, what: &str) -> Result<HomogeneousPoly> {
    let degree = match (p.degree_range(), expected) {
        (Some((lo, hi)), _) if lo != hi => {
            return Err(Error::Invalid(format!(
                "inhomogeneous {what}: monomial degrees range over {lo}..={hi}"
            )))
        }
        (Some((d, _)), Some(e)) if d != e => {
            return Err(Error::Invalid(format!(
                "inhomogeneous {what}: degree {d}, expected {e}"
            )))
        }
        (Some((d, _)), _) => d,
        (None, Some(e)) => e,
        (None, None) => 0,
    };
    HomogeneousPoly::new(p.nvars, degree, p.terms.clone())
}

fn w_vars(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

/// Parses a homogeneous polynomial in `w0..w{nvars-1}`; checks the degree if given.
pub fn parse_homogeneous(text: &str, nvars: usize, degree: Option<u32>) -> Result<HomogeneousPoly> {
    let e = parse_complete(text)?;
    eval_homogeneous(&e, nvars, degree)
}

fn eval_homogeneous(e: &Expr, nvars: usize, degree: Option<u32>) -> Result<HomogeneousPoly> {
    let names = w_vars(nvars);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let ctx = Context {
        vars: &refs,
        allow_var_division: false,
        precision: precision(),
    };
    let v = ctx.eval(e)?;
    to_homogeneous(&v.num, degree, "polynomial")
}

/// Parses a family given as a rational function of `z` or as `[P0 : P1]`.
///
/// In the `z` form the `z`-denominator is cleared and the quotient is
/// homogenized with `z = w0/w1`; powers of `t` stay in the coefficients.
pub fn parse_family(text: &str) -> Result<RationalMapFamily> {
    let label = text.trim().to_string();
    let mut p = Parser::new(text)?;
    let (p0, p1) = if *p.peek() == Tok::LBracket {
        p.expect(Tok::LBracket, "'['")?;
        let a = p.expr()?;
        match p.peek() {
            Tok::Colon | Tok::Comma => p.expect(p.peek().clone(), "':'")?,
            _ => p.expect(Tok::Colon, "':'")?,
        }
        let b = p.expr()?;
        p.expect(Tok::RBracket, "']'")?;
        p.expect_end()?;
        let a = eval_homogeneous(&a, 2, None)?;
        let b = eval_homogeneous(&b, 2, None)?;
        // a zero component takes the degree of the other one
        match (a.is_zero(), b.is_zero()) {
            (true, false) => (HomogeneousPoly::zero(2, b.degree()), b),
            (false, true) => {
                let d = a.degree();
                (a, HomogeneousPoly::zero(2, d))
            }
            _ => (a, b),
        }
    } else {
        let e = p.expr()?;
        p.expect_end()?;
        let ctx = Context {
            vars: &["z"],
            allow_var_division: true,
            precision: precision(),
        };
        let Value { num, den } = ctx.eval(&e)?;
        homogenize_quotient(&num, &den)?
    };
    let fam = RationalMapFamily::new(p0, p1, label)?;
    match crate::berkovich::resultant_valuation(&fam) {
        Ok(_) | Err(Error::Precision(_)) => Ok(fam),
        Err(e) => Err(e),
    }
}

fn homogenize_quotient(num: &Poly, den: &Poly) -> Result<(HomogeneousPoly, HomogeneousPoly)> {
    let top = |p: &Poly| p.degree_range().map(|(_, hi)| hi).unwrap_or(0);
    let d = top(num).max(top(den));
    let lift = |p: &Poly| {
        HomogeneousPoly::new(
            2,
            d,
            p.terms
                .iter()
                .map(|(e, c)| (vec![e[0], d - e[0]], c.clone())),
        )
    };
    Ok((lift(num)?, lift(den)?))
}

/// Parses the sections of an admissible datum of degree `d` on `ℙ^k`.
pub fn parse_sections<S: AsRef<str>>(texts: &[S], k: usize, d: u32) -> Result<AdmissibleDatum> {
    if texts.is_empty() {
        return Err(Error::Invalid(
            "admissible datum needs at least one section".into(),
        ));
    }
    let sections = texts
        .iter()
        .map(|s| parse_homogeneous(s.as_ref(), k + 1, Some(d)))
        .collect::<Result<Vec<_>>>()?;
    AdmissibleDatum::new(k, d, sections)
}
