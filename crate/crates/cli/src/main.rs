use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relent_core::harness::{self, ExperimentConfig};
use relent_core::Error;

/// Exit statuses.
const PASS: u8 = 0;
const CHECK_FAILED: u8 = 1;
const USAGE: u8 = 2;
const DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "relent", version, about = "Relative-entropy experiments for compressible Navier-Stokes")]
struct Cli {
    /// Output directory; overrides the config's `out_dir`.
    #[arg(long, global = true, env = "RELENT_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every absolute tolerance envelope.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// List the registered experiments.
    ListExperiments,
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Observed convergence order from series CSVs named `<name>_n<cells>.csv`.
    Order {
        #[arg(required = true, num_args = 2..)]
        csv: Vec<PathBuf>,
    },
}

fn load(cli: &Cli, path: &PathBuf) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::load(path)?.with_overrides(cli.out_dir.clone(), cli.seed, cli.tol_scale)
}

fn fail(e: &Error) -> u8 {
    eprintln!("error: {e}");
    if e.is_solver_failure() {
        DIVERGED
    } else {
        USAGE
    }
}

fn execute(cli: &Cli) -> u8 {
    match &cli.command {
        Command::ListExperiments => {
            for name in harness::EXPERIMENTS {
                println!("{name:<16} {}", harness::describe(name).unwrap_or(""));
            }
            PASS
        }
        Command::Validate { config } => match load(cli, config) {
            Ok(cfg) => {
                println!("{}: ok ({}, hash {})", config.display(), cfg.experiment, cfg.hash());
                PASS
            }
            Err(e) => fail(&e),
        },
        Command::Order { csv } => match harness::order_from_series(csv) {
            Ok(order) => {
                println!("{order:.6}");
                PASS
            }
            Err(e) => fail(&e),
        },
        Command::Run { config } => {
            let cfg = match load(cli, config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let manifest = match harness::run_experiment(&cfg) {
                Ok(m) => m,
                Err(e) => return fail(&e),
            };
            for c in &manifest.checks {
                println!("{} {:<40} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for (k, v) in &manifest.metrics {
                println!("     {k:<40} {v:e}");
            }
            let dir = cfg.out_dir.unwrap_or_else(|| harness::DEFAULT_OUT_DIR.into());
            println!("manifest: {}", dir.join(format!("{}_manifest.json", cfg.name)).display());
            if manifest.passed {
                PASS
            } else {
                CHECK_FAILED
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    ExitCode::from(execute(&cli))
}
