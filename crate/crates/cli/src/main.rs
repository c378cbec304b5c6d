use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hybrid_degen::exec::{set_threads, Exec};
use hybrid_degen::harness::{run, ExperimentConfig};
use hybrid_degen::Error;

#[derive(Parser)]
#[command(
    name = "hybrid-degen",
    version,
    about = "Degenerating rational maps: complex and non-Archimedean experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed (overrides `sampler.seed`)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Hybrid-circle values of a series against their central limit
    CircleDemo,
    /// Integrals of a hybrid model function along the parameter grid
    HybridConverge,
    /// Lyapunov exponents against log|t|^-1 and the non-Archimedean slope
    LyapSlope,
    /// Green function and equilibrium measure on a probe tree
    NaMeasure,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CircleDemo => "circle-demo",
            Command::HybridConverge => "hybrid-converge",
            Command::LyapSlope => "lyap-slope",
            Command::NaMeasure => "na-measure",
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Parse { .. } | Error::Invalid(_)) => 2,
        _ => 3,
    }
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    let path = cli
        .config
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.sampler.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output = out;
    }
    let exec = match cli.jobs {
        Some(1) => Exec::Sequential,
        Some(n) => {
            set_threads(n)?;
            Exec::Parallel
        }
        None => Exec::Parallel,
    };
    let name = cli.command.name();
    let rec = run(name, &cfg, exec).with_context(|| format!("{name} with {}", path.display()))?;
    let (csv, json) = rec.write(&cfg.output)?;
    println!("{} {}", rec.id, rec.config_hash);
    println!("csv:  {}", csv.display());
    println!("json: {}", json.display());
    for (k, v) in &rec.summary {
        if v.is_number() || v.is_string() || v.is_boolean() {
            println!("  {k} = {v}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
