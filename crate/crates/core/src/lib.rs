//! Numerical companion to degenerating families of rational maps.
//!
//! For a meromorphic family `R_t` of degree-`d` rational maps of the
//! Riemann sphere this crate computes both sides of the degeneration
//! `t → 0`:
//!
//! * the complex side at fixed `t` ([`cxdyn`]): backward-orbit samples of
//!   the measure of maximal entropy, Monte-Carlo integrals and Lyapunov
//!   exponents;
//! * the non-Archimedean side over `ℂ((t))` ([`berkovich`]): type-II points,
//!   the dynamical Green function and its equilibrium measure on a finite
//!   subtree of the Berkovich line;
//! * the hybrid glue ([`hybrid`], [`admissible`]): model functions that
//!   are continuous across the two, evaluated at interior and central fibers.
//!
//! [`harness`] turns these into reproducible experiments with CSV output.

pub mod admissible;
pub mod berkovich;
pub mod cxdyn;
pub mod error;
pub mod exec;
pub mod harness;
pub mod hybrid;
pub mod laurent;
pub mod parser;
pub mod poly;

pub use error::{Error, Result};
