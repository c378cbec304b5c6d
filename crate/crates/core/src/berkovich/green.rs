use serde::{Deserialize, Serialize};

use crate::admissible::family_iterates;
use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::laurent::{rat_to_f64, ExtExp, RationalExp};
use crate::parser::RationalMapFamily;
use crate::poly::{Chart, HomogeneousPoly, UniPoly};

use super::point::TypeIIPoint;
use super::resultant::resultant_valuation;
use super::seminorm::homog_seminorm;

/// `g₁(ξ) = log max_i |P_i|(ξ) − d·log max|w|(ξ)`, in natural-log units.
pub fn green_g1(family: &RationalMapFamily, xi: &TypeIIPoint, r: f64) -> Result<f64> {
    Ok(min_exponent(family.components(), xi)?.times_log(r.ln()))
}

fn min_exponent(ps: [&HomogeneousPoly; 2], xi: &TypeIIPoint) -> Result<ExtExp> {
    Ok(homog_seminorm(ps[0], xi)?.min(homog_seminorm(ps[1], xi)?))
}

/// Partial sum of the Green function with a certified error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    /// `S_n = d^{-n}·log(max_i |P^n_i| / max|w|^{d^n})` at the point.
    pub value: f64,
    /// Exact exponent `q` with `value = q·log r`.
    pub exponent: RationalExp,
    /// Bound on `|g − S_n|`.
    pub error_bound: f64,
    /// Number of iterates used.
    pub n: u32,
}

/// Polynomial `f = P0(z, 1)/κ` of a family lifted as `[P0 : κ·w1^d]` with
/// `κ` an exact monomial.
///
/// Disks are pushed forward one step at a time: a polynomial maps
/// `D(b, r^s)` onto `D(f(b), r^{s'})` with `s' = min_{j≥1} ord(f^{(j)}(b)/j!) + j·s`.
/// Each step is a degree-`d` shift, which stays well conditioned where a
/// shift of the composed degree-`d^n` iterate loses all precision.
#[derive(Clone, Debug)]
struct DiskMap {
    f: UniPoly,
    kappa_ord: RationalExp,
}

impl DiskMap {
    fn new(family: &RationalMapFamily) -> Result<Option<Self>> {
        if family.degree < 2
            || !family.is_polynomial()
            || family
                .components()
                .iter()
                .any(|p| p.terms().any(|(_, c)| !c.is_exact()))
        {
            return Ok(None);
        }
        let kappa = family.p1.coeff(&[0, family.degree]);
        let Some((v, lead)) = kappa.leading() else {
            return Ok(None);
        };
        if kappa.terms().count() != 1 {
            return Ok(None);
        }
        let inv = LaurentSeries::monomial(lead.inv(), -v);
        let f = family.p0.dehomogenize(Chart::Z)?.scale(&inv);
        Ok(Some(DiskMap { f, kappa_ord: v }))
    }

    fn step(&self, b: &LaurentSeries, s: RationalExp) -> Result<(LaurentSeries, RationalExp)> {
        let g = self.f.taylor_shift(b);
        let s2 = g
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(j, c)| match c.ord() {
                ExtExp::Finite(v) if !c.is_zero() => Some(v + s * j as i64),
                _ => None,
            })
            .min()
            .ok_or_else(|| Error::Degenerate("constant polynomial map".into()))?;
        // the center only matters below the new radius
        let b2 = LaurentSeries::from_terms(g.coeffs()[0].terms().filter(|(k, _)| *k < s2), None);
        Ok((b2, s2))
    }

    /// Exponents `d^{-n}·q_n` for `n = 1..=n_max` along the disk orbit.
    fn partial_exponents(&self, xi: &TypeIIPoint, d: i64, n_max: u32) -> Result<Vec<RationalExp>> {
        let zero = RationalExp::from_integer(0);
        let coord = |b: &LaurentSeries, s: RationalExp| match b.ord() {
            ExtExp::Finite(v) if !b.is_zero() => v.min(s).min(zero),
            _ => s.min(zero),
        };
        let (mut b, mut s) = xi.in_chart(Chart::Z)?;
        let e0 = coord(&b, s);
        let mut out = Vec::new();
        let mut dn = 1i64;
        for _ in 0..n_max {
            dn = dn
                .checked_mul(d)
                .ok_or_else(|| Error::Numerical("iterate degree overflow".into()))?;
            (b, s) = self.step(&b, s)?;
            // P^n_1 = κ_n·w1^{d^n} with ord κ_n = ord κ·(d^n − 1)/(d − 1)
            let k = self.kappa_ord * ((dn - 1) / (d - 1));
            let q = k + coord(&b, s) - e0 * dn;
            out.push(q / RationalExp::from_integer(dn));
        }
        Ok(out)
    }
}

fn compose_iterates(family: &RationalMapFamily, n_max: u32) -> Result<Vec<[HomogeneousPoly; 2]>> {
    let mut iterates = family_iterates(family, 1)?;
    while (iterates.len() as u32) < n_max {
        let prev = iterates.last().unwrap();
        let next = [family.p0.compose(&prev[..])?, family.p1.compose(&prev[..])?];
        if next.iter().all(|p| p.is_zero()) {
            break;
        }
        iterates.push(next);
    }
    Ok(iterates)
}

/// Green function evaluator sharing symbolic iterates across points.
///
/// Polynomial families with a monomial leading coefficient follow disk
/// orbits; other families use composed homogeneous iterates.
pub struct GreenSolver {
    family: RationalMapFamily,
    r: f64,
    iterates: Vec<[HomogeneousPoly; 2]>,
    disks: Option<DiskMap>,
    depth: u32,
    constant: f64,
}

impl GreenSolver {
    /// Prepares up to `n_max` iterates, stopping early if coefficients run out.
    pub fn new(family: &RationalMapFamily, r: f64, n_max: u32) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Invalid(format!("r = {r} must lie in (0, 1)")));
        }
        let n_max = n_max.max(1);
        let disks = DiskMap::new(family)?;
        let iterates = match disks {
            Some(_) => Vec::new(),
            None => compose_iterates(family, n_max)?,
        };
        let depth = if disks.is_some() {
            n_max
        } else {
            iterates.len() as u32
        };
        Ok(GreenSolver {
            family: family.clone(),
            r,
            iterates,
            disks,
            depth,
            constant: certificate_constant(family, r)?,
        })
    }

    pub fn family(&self) -> &RationalMapFamily {
        &self.family
    }

    /// Iterates actually available (may be fewer than requested).
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `C` with `|g₁| ≤ C` everywhere, from the coefficient and resultant bounds.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn tail(&self, n: u32) -> f64 {
        let d = self.family.degree as f64;
        self.constant * d.powi(-(n as i32)) / (1.0 - 1.0 / d)
    }

    /// Sequence of partial-sum exponents `d^{-n}·q_n` for `n = 1..`.
    ///
    /// Stops at the first iterate whose seminorm is not determined by the
    /// known coefficients, or whose increment over the previous partial sum
    /// exceeds the certified bound `C·d^{-n}`. The latter only
    /// happens when floating-point cancellation in a high-degree shift has
    /// corrupted the exponent, so the last consistent value is kept.
    pub fn partial_exponents(&self, xi: &TypeIIPoint, n_max: u32) -> Result<Vec<RationalExp>> {
        let d = self.family.degree as i64;
        let n_max = n_max.min(self.depth);
        let raw = match &self.disks {
            Some(dm) => dm.partial_exponents(xi, d, n_max)?,
            None => self.iterate_exponents(xi, d, n_max)?,
        };
        let mut out: Vec<RationalExp> = Vec::with_capacity(raw.len());
        for q in raw {
            if let Some(&prev) = out.last() {
                let n = out.len() as i32 + 1;
                let step = rat_to_f64(q - prev).abs() * self.r.ln().abs();
                if step > self.constant * (d as f64).powi(-n) * (1.0 + 1e-9) {
                    break;
                }
            }
            out.push(q);
        }
        Ok(out)
    }

    fn iterate_exponents(&self, xi: &TypeIIPoint, d: i64, n_max: u32) -> Result<Vec<RationalExp>> {
        let mut out = Vec::new();
        let mut scale = 1i64;
        for it in self.iterates.iter().take(n_max as usize) {
            scale = scale
                .checked_mul(d)
                .ok_or_else(|| Error::Numerical("iterate degree overflow".into()))?;
            match min_exponent([&it[0], &it[1]], xi) {
                Ok(ExtExp::Finite(q)) => out.push(q / RationalExp::from_integer(scale)),
                Ok(ExtExp::Infinite) => {
                    return Err(Error::Degenerate(format!("iterate vanishes at {xi}")))
                }
                Err(Error::Precision(_)) if !out.is_empty() => break,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Partial sum `S_n` at exactly `n` iterates; `Precision` if the point
    /// only supports fewer.
    pub fn eval_at(&self, xi: &TypeIIPoint, n: u32) -> Result<GreenValue> {
        let partial = self.partial_exponents(xi, n)?;
        if (partial.len() as u32) < n {
            return Err(Error::Precision(format!(
                "Green partial sum at {xi} is reliable only up to n = {}",
                partial.len()
            )));
        }
        let q = partial[n as usize - 1];
        Ok(GreenValue {
            value: rat_to_f64(q) * self.r.ln(),
            exponent: q,
            error_bound: self.tail(n),
            n,
        })
    }

    /// Partial sum at the first `n` whose certified tail is below `tol`
    /// (or at the deepest available iterate).
    pub fn eval(&self, xi: &TypeIIPoint, n_max: u32, tol: f64) -> Result<GreenValue> {
        let n_cap = n_max.min(self.depth()).max(1);
        let n_stop = (1..=n_cap).find(|&n| self.tail(n) < tol).unwrap_or(n_cap);
        let partial = self.partial_exponents(xi, n_stop)?;
        let n = partial.len() as u32;
        let q = *partial.last().unwrap();
        Ok(GreenValue {
            value: rat_to_f64(q) * self.r.ln(),
            exponent: q,
            error_bound: self.tail(n),
            n,
        })
    }
}

/// `|log r|·max(|q_min|, |ord Res − (2d−1)·q_min|)`, with `q_min` the smallest
/// coefficient order of the lift.
pub fn certificate_constant(family: &RationalMapFamily, r: f64) -> Result<f64> {
    let q_min = family
        .p0
        .min_coeff_ord()
        .min(family.p1.min_coeff_ord())
        .finite()
        .ok_or_else(|| Error::Degenerate("family has no known coefficients".into()))?;
    let res = resultant_valuation(family)?;
    let d = family.degree as i64;
    let lower = res - q_min * (2 * d - 1);
    Ok(r.ln().abs() * rat_to_f64(q_min).abs().max(rat_to_f64(lower).abs()))
}

/// Green function of the family at `ξ` with a certified error bound.
pub fn green_gr(
    family: &RationalMapFamily,
    xi: &TypeIIPoint,
    n_max: u32,
    tol: f64,
    r: f64,
) -> Result<GreenValue> {
    GreenSolver::new(family, r, n_max)?.eval(xi, n_max, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat, LaurentSeries, C64};
    use crate::parser::parse_family;

    const R: f64 = 0.5;

    #[test]
    fn g1_examples() {
        let xg = TypeIIPoint::gauss();
        let f = parse_family("[w0^2 : w1^2]").unwrap();
        assert_eq!(green_g1(&f, &xg, R).unwrap(), 0.0);
        let f = parse_family("[t*w0^2 : t*w1^2]").unwrap();
        assert!((green_g1(&f, &xg, R).unwrap() - R.ln()).abs() < 1e-15);
        let f = parse_family("[t*w0^2 + w1^2 : t*w1^2]").unwrap();
        assert_eq!(green_g1(&f, &xg, R).unwrap(), 0.0);
    }

    #[test]
    fn good_reduction_is_zero() {
        let f = parse_family("z^2").unwrap();
        let g = green_gr(&f, &TypeIIPoint::gauss(), 8, 1e-12, R).unwrap();
        assert_eq!(g.exponent, int(0));
        let f = parse_family("[w0^2 : t*w1^2]").unwrap();
        let g = green_gr(&f, &TypeIIPoint::gauss(), 6, 1e-12, R).unwrap();
        assert_eq!(g.exponent, int(0));
    }

    #[test]
    fn disk_orbits_match_composed_iterates() {
        use crate::berkovich::{probe_points, ProbeOptions};
        // the composed cubic iterate of degree 27 already loses precision at
        // the non-real centers, so it is compared one level lower
        let cases = [
            ("z^2 + 1/t", 3),
            ("z^2 + t*z", 3),
            ("[w0^2 + w1^2 : t*w1^2]", 3),
            ("z^3 + t^-2", 2),
        ];
        for (text, n) in cases {
            let f = parse_family(text).unwrap();
            let fast = GreenSolver::new(&f, R, n).unwrap();
            assert!(fast.disks.is_some(), "{text}");
            let slow = GreenSolver {
                disks: None,
                iterates: compose_iterates(&f, n).unwrap(),
                ..GreenSolver::new(&f, R, n).unwrap()
            };
            let opts = ProbeOptions {
                depth: 1,
                ..ProbeOptions::default()
            };
            for xi in probe_points(&f, &opts).unwrap() {
                assert_eq!(
                    fast.partial_exponents(&xi, n).unwrap(),
                    slow.partial_exponents(&xi, n).unwrap(),
                    "{text} at {xi}"
                );
            }
        }
    }

    #[test]
    fn inverse_t_family() {
        let f = parse_family("z^2 + 1/t").unwrap();
        let solver = GreenSolver::new(&f, R, 5).unwrap();
        let xg = TypeIIPoint::gauss();
        let seq = solver.partial_exponents(&xg, 5).unwrap();
        assert_eq!(seq[0], int(-1) / int(2));
        assert!(seq.iter().all(|&q| q == rat(-1, 2)));
        let zeta = TypeIIPoint::disk(
            LaurentSeries::monomial(C64::new(0.0, 1.0), rat(-1, 2)),
            int(0),
        )
        .unwrap();
        let seq = solver.partial_exponents(&zeta, 5).unwrap();
        assert_eq!(*seq.last().unwrap(), rat(1, 4));
    }

    #[test]
    fn increments_respect_certificate() {
        for text in ["z^2 + 1/t", "z^2 + t*z", "(z^2 - t)/z", "z^3 + t^-2"] {
            let f = parse_family(text).unwrap();
            let solver = GreenSolver::new(&f, R, 5).unwrap();
            let d = f.degree as f64;
            let xi = TypeIIPoint::disk(LaurentSeries::zero(), rat(1, 2)).unwrap();
            let seq = solver.partial_exponents(&xi, 5).unwrap();
            let mut prev = 0.0;
            for (n, q) in seq.iter().enumerate() {
                let s = rat_to_f64(*q) * R.ln();
                assert!((s - prev).abs() <= solver.constant() * d.powi(-(n as i32)) + 1e-12);
                prev = s;
            }
        }
    }
}
