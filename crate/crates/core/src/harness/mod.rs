//! Experiment configuration, orchestration and persistence.
//!
//! Each experiment reads an [`ExperimentConfig`], runs its grid (cells in
//! parallel, results sorted by grid index, randomness from per-cell seeds)
//! and returns a [`ResultRecord`] that is written as a versioned CSV plus a
//! JSON summary.

mod config;
mod experiments;
mod fit;
mod record;

pub use config::{
    CircleConfig, DatumConfig, ExperimentConfig, GreenConfig, GridCell, SamplerConfig, TGrid,
};
pub use experiments::{
    cell_seed, cmd_circle_demo, cmd_hybrid_converge, cmd_lyap_slope, cmd_na_measure, na_side, run,
    ModulusSummary, SAMPLER_START,
};
pub use fit::{fit_line, LineFit};
pub use record::{fmt_f64, ResultRecord, Table, SCHEMA_VERSION};

/// Subcommand names accepted by [`run`].
pub const EXPERIMENTS: [&str; 4] = ["circle-demo", "hybrid-converge", "lyap-slope", "na-measure"];
