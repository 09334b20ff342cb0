use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use magel_cli::{load_config, run_experiment, Experiment, RawConfig, RunOptions};

#[derive(Parser, Debug)]
#[command(name = "magel", version, about = "Magnetoelastic convergence studies on structured grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recovery-sequence energies against the limit functional
    GammaStudy(Flags),
    /// Uniformly magnetized ball against the closed-form stray field
    StrayCheck(Flags),
    /// Well distances on the sphere by mesh level
    Geodesic(Flags),
    /// Alternating minimization of the limit total energy
    MinimizeLimit(Flags),
    /// Projected descent on the diffuse total energy
    MinimizeDiffuse(Flags),
    /// Descent energies against the limit minimizer along the schedule
    AlmostMinStudy(Flags),
    /// Runs the experiment named in the configuration or manifest
    Run(Flags),
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// JSON configuration or a previous manifest.json
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write VTK snapshots
    #[arg(long)]
    snapshots: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match cli.command {
        Command::GammaStudy(f) => (Some(Experiment::GammaStudy), f),
        Command::StrayCheck(f) => (Some(Experiment::StrayCheck), f),
        Command::Geodesic(f) => (Some(Experiment::Geodesic), f),
        Command::MinimizeLimit(f) => (Some(Experiment::MinimizeLimit), f),
        Command::MinimizeDiffuse(f) => (Some(Experiment::MinimizeDiffuse), f),
        Command::AlmostMinStudy(f) => (Some(Experiment::AlmostMinStudy), f),
        Command::Run(f) => (None, f),
    };
    let mut raw = match &flags.config {
        Some(p) => match load_config(p) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(magel_cli::exit_code(&e) as u8);
            }
        },
        None => RawConfig::default(),
    };
    if flags.out.is_some() {
        raw.output = flags.out.clone();
    }
    if flags.seed.is_some() {
        raw.seed = flags.seed;
    }
    let cfg = match raw.resolve(kind) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(magel_cli::exit_code(&e) as u8);
        }
    };
    let opts = RunOptions { snapshots: flags.snapshots, threads: flags.threads };
    match run_experiment(&cfg, opts) {
        Ok(report) => {
            println!("{} rows -> {}", report.table.rows.len(), report.results.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
