//! Truncated Laurent/Puiseux series over `ℂ` with exact exponents.
//!
//! A [`LaurentSeries`] stands in for an element of the ring of functions
//! meromorphic at `t = 0`: coefficients are double precision, exponents are
//! exact rationals, and every arithmetic result records how far it is known.
//! The `r`-norm is `|t|_r = r`, so `|f|_r = r^{ord f}`.

mod exp;
mod series;

pub use exp::{int, rat, rat_to_f64, ExtExp, RationalExp};
pub(crate) use series::{fmt_exponent, fmt_term, join_terms};
pub use series::{LaurentSeries, C64};
