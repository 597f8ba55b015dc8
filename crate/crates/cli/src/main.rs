//! `resonance-box`: batch CLI over the shape-resonance pipeline.
//!
//! Every command reads one INI config, runs a pipeline stage and writes a
//! deterministic CSV into the output directory.

mod commands;
mod config;
mod output;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use commands::CommandCtx;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "resonance-box",
    version,
    about = "Dirichlet-box spectra for 1D shape resonances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the INI run configuration.
    #[arg(long, global = true, default_value = "configs/canonical.ini")]
    config: PathBuf,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (falls back to RESONANCE_BOX_JOBS, then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Stamp outputs with the wall-clock time (off by default; breaks
    /// byte-for-byte reproducibility).
    #[arg(long, global = true, default_value_t = false)]
    timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the boxed operator at the configured geometry.
    Spectrum,
    /// Interior and exterior Dirichlet spectra.
    Decoupled,
    /// Agmon distances at the well-bottom energy.
    Agmon,
    /// Eigenvalue branches over the ell grid.
    Sweep,
    /// Detected and refined avoided crossings.
    Crossings,
    /// WKB-predicted exterior levels against the numeric spectrum.
    Wkb,
    /// log(observable) vs 1/hbar scaling study.
    Scaling,
    /// Per-level resonance summary.
    Report,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        let code = e
            .downcast_ref::<resonance_core::Error>()
            .map(|ce| ce.exit_code())
            .unwrap_or(2);
        std::process::exit(code);
    }
}

fn run(cli: &Cli) -> Result<()> {
    let jobs = cli.jobs.or_else(|| {
        std::env::var("RESONANCE_BOX_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }

    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("reading config {}", cli.config.display()))?;
    let cfg = config::parse_config(&text)?;

    let timestamp = cli.timestamp.then(|| {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("unix:{secs}")
    });
    let ctx = CommandCtx {
        cfg: &cfg,
        out_dir: &cli.out,
        timestamp,
    };

    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Decoupled => commands::decoupled(&ctx),
        Command::Agmon => commands::agmon(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Crossings => commands::crossings(&ctx),
        Command::Wkb => commands::wkb(&ctx),
        Command::Scaling => commands::scaling(&ctx),
        Command::Report => commands::report(&ctx),
    }
}
