//! `hamsim`: batch runner for search-model, Trotter, decomposition and cost experiments.
//!
//! Exit status: 0 success, 2 invalid input, 3 a numerical check failed,
//! 4 I/O error.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::{Context, Outcome};
use crate::config::{thread_count, FileConfig, Format};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "hamsim", version, about = "Hamiltonian simulation and quantum search experiments")]
struct Cli {
    /// Flat TOML file with default values for any option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for Monte Carlo sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: HAMSIM_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bloch trajectories of continuous and Grover evolution from |s> to |t>.
    Trajectory(commands::TrajectoryArgs),
    /// Residual table for rebuilding continuous evolution from Grover steps.
    Equivalence(commands::EquivalenceArgs),
    /// Trotter error against step size.
    TrotterScan(commands::TrotterScanArgs),
    /// Split a lattice Hamiltonian into block-diagonal terms.
    Decompose(commands::DecomposeArgs),
    /// Full state-vector success curve and majority-vote table.
    Grover(commands::GroverArgs),
    /// Trotter versus Grover-with-majority cost comparison.
    Cost(commands::CostArgs),
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(k) = thread_count(cli.threads, &file)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| error::invalid(format!("thread pool: {e}")))?;
    }
    let out_path = cli.out.clone().or(file.out.clone());
    let ctx = Context { file, format: cli.format, seed: cli.seed };

    let start = Instant::now();
    let outcome: Outcome = match &cli.command {
        Command::Trajectory(a) => commands::trajectory(a, &ctx)?,
        Command::Equivalence(a) => commands::equivalence(a, &ctx)?,
        Command::TrotterScan(a) => commands::trotter_scan(a, &ctx)?,
        Command::Decompose(a) => commands::decompose_cmd(a, &ctx)?,
        Command::Grover(a) => commands::grover(a, &ctx)?,
        Command::Cost(a) => commands::cost(a, &ctx)?,
    };
    log::info!("computed in {:.3} s", start.elapsed().as_secs_f64());

    write_to(out_path.as_deref(), &outcome.body)?;
    if let Some((path, bytes)) = &outcome.report {
        match path {
            Some(p) => write_to(Some(p), bytes)?,
            None => std::io::stderr().write_all(bytes).map_err(|e| CliError::io("<stderr>", e))?,
        }
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hamsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
