use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, RationalExp};
use crate::poly::Chart;

/// Closed disk `D(center, r^s)` in one of the two affine charts of `ℙ¹`.
///
/// Points are stored canonically: chart `z` when the disk lies in the closed
/// unit disk `|z| ≤ 1`, chart `u = 1/z` otherwise (then it lies in `|u| < 1`).
/// The center keeps only terms of order below `s`, so two representations of
/// the same disk compare equal up to floating-point noise in coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeIIPoint {
    chart: Chart,
    center: LaurentSeries,
    s: RationalExp,
}

/// Center restricted to its terms of order `< s`; needs the center known that far.
fn reduce(center: &LaurentSeries, s: RationalExp) -> Result<LaurentSeries> {
    if let Some(tr) = center.trunc_order() {
        if tr < s {
            return Err(Error::Precision(format!(
                "disk center known to order {tr}, radius exponent is {s}"
            )));
        }
    }
    Ok(center.truncated(s).exact_part())
}

/// The same disk seen through `w ↦ 1/w`.
fn flip(center: &LaurentSeries, s: RationalExp) -> Result<(LaurentSeries, RationalExp)> {
    match center.ord() {
        ExtExp::Finite(v) if !center.is_zero() && v < s => {
            let s2 = s - v * 2;
            let inv = center.inv_to(s2)?;
            Ok((reduce(&inv, s2)?, s2))
        }
        // the disk contains the origin: it is D(0, r^s), which maps to D(0, r^{-s})
        _ => Ok((LaurentSeries::zero(), -s)),
    }
}

impl TypeIIPoint {
    pub fn new(chart: Chart, center: LaurentSeries, s: RationalExp) -> Result<Self> {
        let c = reduce(&center, s)?;
        let (zc, zs) = match chart {
            Chart::Z => (c, s),
            Chart::InvZ => flip(&c, s)?,
        };
        if zs >= RationalExp::from_integer(0) && zc.ord() >= ExtExp::ZERO {
            return Ok(TypeIIPoint {
                chart: Chart::Z,
                center: zc,
                s: zs,
            });
        }
        let (uc, us) = flip(&zc, zs)?;
        Ok(TypeIIPoint {
            chart: Chart::InvZ,
            center: uc,
            s: us,
        })
    }

    /// The disk `D(center, r^s)` in the `z` chart.
    pub fn disk(center: LaurentSeries, s: RationalExp) -> Result<Self> {
        Self::new(Chart::Z, center, s)
    }

    /// The Gauss point `D(0, 1)`.
    pub fn gauss() -> Self {
        TypeIIPoint {
            chart: Chart::Z,
            center: LaurentSeries::zero(),
            s: RationalExp::from_integer(0),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn center(&self) -> &LaurentSeries {
        &self.center
    }

    pub fn radius_exp(&self) -> RationalExp {
        self.s
    }

    pub fn is_gauss(&self) -> bool {
        self.s == RationalExp::from_integer(0)
    }

    /// Center and radius exponent in a requested chart.
    pub fn in_chart(&self, chart: Chart) -> Result<(LaurentSeries, RationalExp)> {
        if chart == self.chart {
            Ok((self.center.clone(), self.s))
        } else {
            flip(&self.center, self.s)
        }
    }

    /// Whether `other` lies on or below `self` seen from the Gauss point.
    pub fn is_ancestor_of(&self, other: &TypeIIPoint) -> bool {
        if self.is_gauss() {
            return true;
        }
        if self.chart != other.chart || self.s > other.s {
            return false;
        }
        (&other.center - &self.center).ord() >= ExtExp::Finite(self.s)
    }

    /// Same disk, up to coefficient noise.
    pub fn same_as(&self, other: &TypeIIPoint) -> bool {
        self.s == other.s && self.is_ancestor_of(other)
    }

    /// Deepest common ancestor, seen from the Gauss point.
    pub fn join(&self, other: &TypeIIPoint) -> Result<TypeIIPoint> {
        if self.is_gauss() || other.is_gauss() || self.chart != other.chart {
            return Ok(TypeIIPoint::gauss());
        }
        let m = match (&self.center - &other.center).ord() {
            ExtExp::Finite(v) => v.min(self.s).min(other.s),
            ExtExp::Infinite => self.s.min(other.s),
        };
        TypeIIPoint::new(self.chart, self.center.clone(), m)
    }

    /// Path length in units where `r^s` and `r^{s+1}` are one apart.
    pub fn distance(&self, other: &TypeIIPoint) -> Result<RationalExp> {
        let j = self.join(other)?;
        Ok((self.s - j.s) + (other.s - j.s))
    }
}

impl fmt::Display for TypeIIPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.chart {
            Chart::Z => "z",
            Chart::InvZ => "u",
        };
        write!(
            f,
            "D_{var}({}, r^{})",
            self.center,
            crate::laurent::fmt_exponent(self.s)
        )
    }
}

/// A point of the Berkovich line used as a fiber over the central point.
#[derive(Clone, Debug, PartialEq)]
pub enum BerkPoint {
    TypeII(TypeIIPoint),
    /// A rigid point given by Laurent homogeneous coordinates.
    TypeI(Vec<LaurentSeries>),
}

impl From<TypeIIPoint> for BerkPoint {
    fn from(p: TypeIIPoint) -> Self {
        BerkPoint::TypeII(p)
    }
}

/// Serializable view of a type-II point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub chart: Chart,
    pub center: String,
    pub s: String,
}

impl From<&TypeIIPoint> for PointRecord {
    fn from(p: &TypeIIPoint) -> Self {
        PointRecord {
            chart: p.chart,
            center: p.center.to_string(),
            s: ExtExp::Finite(p.s).to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat, C64};

    fn tpow(c: f64, k: RationalExp) -> LaurentSeries {
        LaurentSeries::monomial(C64::new(c, 0.0), k)
    }

    #[test]
    fn large_disks_move_to_the_other_chart() {
        let p = TypeIIPoint::disk(LaurentSeries::zero(), int(-1)).unwrap();
        assert_eq!(p.chart(), Chart::InvZ);
        assert_eq!(p.radius_exp(), int(1));
        let back = TypeIIPoint::new(Chart::InvZ, LaurentSeries::zero(), int(1)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn far_centers_invert() {
        // D(i t^{-1/2}, 1) ↔ D_u(-i t^{1/2}, r^1)
        let a = LaurentSeries::monomial(C64::new(0.0, 1.0), rat(-1, 2));
        let p = TypeIIPoint::disk(a, int(0)).unwrap();
        assert_eq!(p.chart(), Chart::InvZ);
        assert_eq!(p.radius_exp(), int(1));
        assert!(p.center().approx_eq(
            &LaurentSeries::monomial(C64::new(0.0, -1.0), rat(1, 2)),
            1e-14
        ));
    }

    #[test]
    fn unit_sized_centers_stay() {
        let p = TypeIIPoint::disk(tpow(1.0, int(0)), int(1)).unwrap();
        assert_eq!(p.chart(), Chart::Z);
        let q = TypeIIPoint::new(Chart::InvZ, tpow(1.0, int(0)), int(1)).unwrap();
        assert!(p.same_as(&q));
    }

    #[test]
    fn gauss_from_either_chart() {
        let g = TypeIIPoint::new(Chart::InvZ, LaurentSeries::zero(), int(0)).unwrap();
        assert_eq!(g, TypeIIPoint::gauss());
        let g = TypeIIPoint::disk(tpow(3.0, int(1)), int(0)).unwrap();
        assert_eq!(g, TypeIIPoint::gauss());
    }

    #[test]
    fn joins() {
        let a = TypeIIPoint::disk(LaurentSeries::t(), int(2)).unwrap();
        let b = TypeIIPoint::disk(-LaurentSeries::t(), int(2)).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(j, TypeIIPoint::disk(LaurentSeries::zero(), int(1)).unwrap());
        assert_eq!(a.distance(&b).unwrap(), int(2));
        let far = TypeIIPoint::disk(LaurentSeries::zero(), int(-2)).unwrap();
        assert_eq!(a.join(&far).unwrap(), TypeIIPoint::gauss());
        assert_eq!(a.distance(&far).unwrap(), int(4));
    }

    #[test]
    fn truncated_center_needs_precision() {
        let c = LaurentSeries::from_terms([(int(0), C64::new(1.0, 0.0))], Some(int(1)));
        assert!(matches!(
            TypeIIPoint::disk(c.clone(), int(2)),
            Err(Error::Precision(_))
        ));
        assert!(TypeIIPoint::disk(c, int(1)).is_ok());
    }
}
