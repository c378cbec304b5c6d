use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Exact rational exponent: t-adic orders, radius exponents, valuations.
pub type RationalExp = Ratio<i64>;

/// Shorthand constructor for a reduced rational exponent.
pub fn rat(numer: i64, denom: i64) -> RationalExp {
    Ratio::new(numer, denom)
}

pub fn int(n: i64) -> RationalExp {
    Ratio::from_integer(n)
}

pub fn rat_to_f64(q: RationalExp) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// A rational exponent extended by `+∞`.
///
/// `+∞` is the order of the exact zero series and the seminorm exponent of a
/// polynomial vanishing identically at a point (`|f| = r^∞ = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtExp {
    Finite(RationalExp),
    Infinite,
}

impl ExtExp {
    pub const ZERO: ExtExp = ExtExp::Finite(Ratio::new_raw(0, 1));

    pub fn finite(self) -> Option<RationalExp> {
        match self {
            ExtExp::Finite(q) => Some(q),
            ExtExp::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtExp::Infinite)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtExp::Finite(q) => rat_to_f64(q),
            ExtExp::Infinite => f64::INFINITY,
        }
    }

    /// `r^self`, with `r^∞ = 0`.
    pub fn power_of(self, r: f64) -> f64 {
        match self {
            ExtExp::Finite(q) => r.powf(rat_to_f64(q)),
            ExtExp::Infinite => 0.0,
        }
    }

    /// `self · log r` as a real log; `+∞ · log r = −∞` for `r < 1`.
    pub fn times_log(self, log_r: f64) -> f64 {
        match self {
            ExtExp::Finite(q) => rat_to_f64(q) * log_r,
            ExtExp::Infinite => {
                if log_r < 0.0 {
                    f64::NEG_INFINITY
                } else if log_r > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    pub fn min(self, other: ExtExp) -> ExtExp {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<RationalExp> for ExtExp {
    fn from(q: RationalExp) -> Self {
        ExtExp::Finite(q)
    }
}

impl From<Option<RationalExp>> for ExtExp {
    fn from(q: Option<RationalExp>) -> Self {
        match q {
            Some(q) => ExtExp::Finite(q),
            None => ExtExp::Infinite,
        }
    }
}

impl PartialOrd for ExtExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtExp {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtExp::Finite(a), ExtExp::Finite(b)) => a.cmp(b),
            (ExtExp::Finite(_), ExtExp::Infinite) => Ordering::Less,
            (ExtExp::Infinite, ExtExp::Finite(_)) => Ordering::Greater,
            (ExtExp::Infinite, ExtExp::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for ExtExp {
    type Output = ExtExp;
    fn add(self, rhs: ExtExp) -> ExtExp {
        match (self, rhs) {
            (ExtExp::Finite(a), ExtExp::Finite(b)) => ExtExp::Finite(a + b),
            _ => ExtExp::Infinite,
        }
    }
}

impl Add<RationalExp> for ExtExp {
    type Output = ExtExp;
    fn add(self, rhs: RationalExp) -> ExtExp {
        self + ExtExp::Finite(rhs)
    }
}

impl Sub<RationalExp> for ExtExp {
    type Output = ExtExp;
    fn sub(self, rhs: RationalExp) -> ExtExp {
        self + ExtExp::Finite(-rhs)
    }
}

/// Scaling by a nonnegative integer; `0 · ∞ = 0` (the empty sum).
impl Mul<i64> for ExtExp {
    type Output = ExtExp;
    fn mul(self, rhs: i64) -> ExtExp {
        match self {
            ExtExp::Finite(q) => ExtExp::Finite(q * rhs),
            ExtExp::Infinite if rhs == 0 => ExtExp::ZERO,
            ExtExp::Infinite => ExtExp::Infinite,
        }
    }
}

impl Neg for ExtExp {
    type Output = Option<ExtExp>;
    /// Negation is only defined for finite values.
    fn neg(self) -> Option<ExtExp> {
        self.finite().map(|q| ExtExp::Finite(-q))
    }
}

impl fmt::Display for ExtExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtExp::Finite(q) if q.denom() == &1 => write!(f, "{}", q.numer()),
            ExtExp::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            ExtExp::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![ExtExp::Infinite, rat(1, 2).into(), int(-3).into()];
        v.sort();
        assert_eq!(v, vec![int(-3).into(), rat(1, 2).into(), ExtExp::Infinite]);
    }

    #[test]
    #[allow(clippy::erasing_op)]
    fn infinite_times_zero_is_zero() {
        assert_eq!(ExtExp::Infinite * 0, ExtExp::ZERO);
        assert_eq!(ExtExp::Infinite * 3, ExtExp::Infinite);
    }

    #[test]
    fn log_scaling() {
        let lr = 0.5f64.ln();
        assert_eq!(ExtExp::Infinite.times_log(lr), f64::NEG_INFINITY);
        assert!((ExtExp::from(rat(3, 2)).times_log(lr) - 1.5 * lr).abs() < 1e-15);
        assert_eq!(ExtExp::Infinite.power_of(0.5), 0.0);
    }
}
