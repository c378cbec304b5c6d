//! Points of the hybrid circle and the hybrid fibration, by evaluation.
//!
//! An interior point is a complex parameter `0 < |t| ≤ r`; the central point
//! stands for `t = 0`, where a series is measured by its `r`-norm. A function
//! `f` takes the value `|f(t)|^{n(t)}` at an interior point and `r^{ord f}`
//! at the central one, with scaling factor `n(t) = log r / log |t|`.

use crate::admissible::{g_na, phi_complex, AdmissibleDatum};
use crate::berkovich::BerkPoint;
use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HybridPoint {
    Interior { t: C64, r: f64 },
    Central { r: f64 },
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("r = {r} must lie in (0, 1)")))
    }
}

impl HybridPoint {
    pub fn interior(t: C64, r: f64) -> Result<Self> {
        check_r(r)?;
        let m = t.norm();
        // tolerate rounding in t = r·e^{iθ}
        if !(m > 0.0 && m <= r * (1.0 + 1e-12)) {
            return Err(Error::Invalid(format!("|t| = {m} outside (0, {r}]")));
        }
        Ok(HybridPoint::Interior { t, r })
    }

    pub fn central(r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(HybridPoint::Central { r })
    }

    pub fn r(&self) -> f64 {
        match *self {
            HybridPoint::Interior { r, .. } | HybridPoint::Central { r } => r,
        }
    }

    pub fn is_central(&self) -> bool {
        matches!(self, HybridPoint::Central { .. })
    }
}

/// `log r / log |t|` at interior points, `0` at the central point.
pub fn scaling_n(p: &HybridPoint) -> f64 {
    match *p {
        HybridPoint::Interior { t, r } => (r.ln() / t.norm().ln()).min(1.0),
        HybridPoint::Central { .. } => 0.0,
    }
}

/// Value of the hybrid seminorm of `f` at `p`.
///
/// A pole of `f` exactly at an interior `t` yields `+∞`.
pub fn tau_eval(f: &LaurentSeries, p: &HybridPoint) -> f64 {
    match *p {
        HybridPoint::Interior { t, .. } => match f.eval_principal(t) {
            Ok(v) if v.is_finite() => {
                let m = v.norm();
                if m == 0.0 {
                    0.0
                } else {
                    (scaling_n(p) * m.ln()).exp()
                }
            }
            _ => f64::INFINITY,
        },
        HybridPoint::Central { r } => match f.ord() {
            ExtExp::Finite(_) if f.is_zero() => 0.0,
            e => e.power_of(r),
        },
    }
}

/// What lies over a hybrid base point.
#[derive(Clone, Debug, PartialEq)]
pub enum Fiber {
    /// Homogeneous coordinates in the complex fiber over an interior `t`.
    Complex(Vec<C64>),
    /// A Berkovich point over the central point.
    Berk(BerkPoint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridFiberPoint {
    base: HybridPoint,
    fiber: Fiber,
}

impl HybridFiberPoint {
    /// The point `[z]` of the fiber over an interior `t`.
    pub fn complex(z: Vec<C64>, t: C64, r: f64) -> Result<Self> {
        if z.iter().all(|w| *w == C64::new(0.0, 0.0)) {
            return Err(Error::Invalid("zero homogeneous vector".into()));
        }
        Ok(HybridFiberPoint {
            base: HybridPoint::interior(t, r)?,
            fiber: Fiber::Complex(z),
        })
    }

    /// A point of the central (non-Archimedean) fiber.
    pub fn central(xi: BerkPoint, r: f64) -> Result<Self> {
        Ok(HybridFiberPoint {
            base: HybridPoint::central(r)?,
            fiber: Fiber::Berk(xi),
        })
    }

    pub fn base(&self) -> &HybridPoint {
        &self.base
    }

    pub fn fiber(&self) -> &Fiber {
        &self.fiber
    }
}

/// Hybrid model function: `n(t)·φ_F` on interior fibers, `g_F` on the central one.
pub fn hybrid_model_value(datum: &AdmissibleDatum, x: &HybridFiberPoint) -> Result<f64> {
    match (&x.base, &x.fiber) {
        (HybridPoint::Interior { t, .. }, Fiber::Complex(z)) => {
            let phi = phi_complex(datum, z, *t)?;
            let n = scaling_n(&x.base);
            Ok(if phi == f64::NEG_INFINITY {
                phi
            } else {
                n * phi
            })
        }
        (HybridPoint::Central { r }, Fiber::Berk(xi)) => g_na(datum, xi, *r),
        _ => Err(Error::Invalid("fiber does not match its base point".into())),
    }
}
