//! Type-II points of the Berkovich projective line over `ℂ((t))`, disk
//! seminorms, the dynamical Green function, tree Laplacians and the
//! non-Archimedean Lyapunov exponent.
//!
//! All valuations are exponents: a quantity of size `r^q` is stored as `q`,
//! so `log` of it is `q·log r`.

mod green;
mod point;
mod puiseux;
mod resultant;
mod seminorm;
mod tree;

pub use green::{certificate_constant, green_g1, green_gr, GreenSolver, GreenValue};
pub use point::{BerkPoint, PointRecord, TypeIIPoint};
pub use puiseux::puiseux_roots;
pub use resultant::{determinant_order, resultant_complex, resultant_valuation, sylvester_matrix};
pub use seminorm::{homog_seminorm, homog_seminorm_point, poly_seminorm};
pub use tree::{
    jacobian_det, log_det_exponent, na_lyapunov, na_lyapunov_exponent, na_measure, probe_points,
    probe_tree, subtree_span, tree_ma, tree_ma_exact, BerkTree, MassRecord, NaMeasure,
    ProbeOptions, TreeMeasure, CLIP_TOL,
};
