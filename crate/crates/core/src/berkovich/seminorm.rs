use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, RationalExp};
use crate::poly::{HomogeneousPoly, UniPoly};

use super::point::{BerkPoint, TypeIIPoint};

/// Exponent `q` with `|f|(ξ) = r^q` for `f` written in the chart of `ξ`.
///
/// Expands `f` at the disk center and takes `min_j ord(f_j) + j·s`. Returns
/// `+∞` when no coefficient has a known term, and a precision error when a
/// coefficient known only as `O(t^k)` could still undercut the minimum.
pub fn poly_seminorm(f: &UniPoly, xi: &TypeIIPoint) -> Result<ExtExp> {
    let g = f.taylor_shift(xi.center());
    let s = xi.radius_exp();
    let mut best = ExtExp::Infinite;
    let mut bound = ExtExp::Infinite;
    for (j, c) in g.coeffs().iter().enumerate() {
        let js = s * j as i64;
        if c.is_zero() {
            if let Some(tr) = c.trunc_order() {
                bound = bound.min(ExtExp::Finite(tr + js));
            }
        } else {
            best = best.min(c.ord() + js);
        }
    }
    if !best.is_infinite() && bound <= best {
        return Err(Error::Precision(format!(
            "seminorm at {xi}: unknown coefficient bounded by r^{bound} vs r^{best}"
        )));
    }
    Ok(best)
}

/// Exponent of `|w|` at `ξ` in its own chart: `|w|(ξ) = max(|a|, r^s)`.
fn coordinate_exponent(xi: &TypeIIPoint) -> RationalExp {
    match xi.center().ord() {
        ExtExp::Finite(v) if !xi.center().is_zero() => v.min(xi.radius_exp()),
        _ => xi.radius_exp(),
    }
}

/// Exponent of `|P(w)| / max(|w0|, |w1|)^d` at `ξ`.
pub fn homog_seminorm(p: &HomogeneousPoly, xi: &TypeIIPoint) -> Result<ExtExp> {
    let f = p.dehomogenize(xi.chart())?;
    let q = poly_seminorm(&f, xi)?;
    let w = coordinate_exponent(xi).min(RationalExp::from_integer(0));
    Ok(q - w * p.degree() as i64)
}

fn eval_at_series(p: &HomogeneousPoly, coords: &[LaurentSeries]) -> Result<LaurentSeries> {
    if coords.len() != p.nvars() {
        return Err(Error::Invalid(format!(
            "point has {} coordinates, polynomial has {} variables",
            coords.len(),
            p.nvars()
        )));
    }
    let parts = p
        .terms()
        .map(|(e, c)| {
            e.iter()
                .zip(coords)
                .fold(c.clone(), |acc, (&k, x)| &acc * &x.pow(k))
        })
        .collect();
    Ok(crate::poly::sum_series(parts))
}

/// [`homog_seminorm`] for any fiber point of the central fiber.
///
/// The Gauss point accepts forms in any number of variables (Gauss norm of
/// the coefficients); other type-II points need binary forms.
pub fn homog_seminorm_point(p: &HomogeneousPoly, xi: &BerkPoint) -> Result<ExtExp> {
    match xi {
        BerkPoint::TypeII(x) if x.is_gauss() => {
            if p.terms().all(|(_, c)| c.is_zero()) && p.min_trunc().is_none() {
                return Ok(ExtExp::Infinite);
            }
            Ok(p.min_coeff_ord())
        }
        BerkPoint::TypeII(x) => homog_seminorm(p, x),
        BerkPoint::TypeI(coords) => {
            let v = eval_at_series(p, coords)?;
            let m = coords
                .iter()
                .map(|c| c.ord())
                .min()
                .unwrap_or(ExtExp::Infinite);
            match (v.ord(), m) {
                (_, ExtExp::Infinite) => Err(Error::Invalid("zero homogeneous vector".into())),
                (ExtExp::Finite(_), ExtExp::Finite(_)) if v.is_zero() => Err(Error::Precision(
                    "section vanishes to the known precision at a rigid point".into(),
                )),
                (q, ExtExp::Finite(m)) => Ok(q - m * p.degree() as i64),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, C64};
    use crate::parser::parse_homogeneous;

    fn hp(s: &str) -> HomogeneousPoly {
        parse_homogeneous(s, 2, None).unwrap()
    }

    fn uni(s: &str) -> UniPoly {
        hp(s).dehomogenize(crate::poly::Chart::Z).unwrap()
    }

    #[test]
    fn disk_seminorms() {
        let s = int(3);
        let xi = TypeIIPoint::disk(LaurentSeries::zero(), s).unwrap();
        assert_eq!(
            poly_seminorm(&uni("w0^2"), &xi).unwrap(),
            ExtExp::Finite(int(6))
        );
        let xi = TypeIIPoint::disk(LaurentSeries::zero(), int(2)).unwrap();
        assert_eq!(
            poly_seminorm(&uni("w0^2 - t^2*w1^2"), &xi).unwrap(),
            ExtExp::Finite(int(2))
        );
        assert_eq!(
            poly_seminorm(&uni("w0"), &TypeIIPoint::gauss()).unwrap(),
            ExtExp::ZERO
        );
        assert_eq!(
            poly_seminorm(&uni("0*w0"), &TypeIIPoint::gauss()).unwrap(),
            ExtExp::Infinite
        );
    }

    #[test]
    fn homogeneous_examples() {
        let xg = TypeIIPoint::gauss();
        assert_eq!(homog_seminorm(&hp("w0*w1"), &xg).unwrap(), ExtExp::ZERO);
        assert_eq!(
            homog_seminorm(&hp("t*w0^2"), &xg).unwrap(),
            ExtExp::Finite(int(1))
        );
        let big = TypeIIPoint::disk(LaurentSeries::zero(), int(-1)).unwrap();
        assert_eq!(homog_seminorm(&hp("w0^2"), &big).unwrap(), ExtExp::ZERO);
    }

    #[test]
    fn rigid_points() {
        let p = hp("w0^2 - t*w1^2");
        let x = BerkPoint::TypeI(vec![LaurentSeries::t(), LaurentSeries::one()]);
        assert_eq!(
            homog_seminorm_point(&p, &x).unwrap(),
            ExtExp::Finite(int(1))
        );
        let root = BerkPoint::TypeI(vec![
            LaurentSeries::monomial(C64::new(1.0, 0.0), crate::laurent::rat(1, 2)),
            LaurentSeries::one(),
        ]);
        assert_eq!(homog_seminorm_point(&p, &root).unwrap(), ExtExp::Infinite);
    }
}
