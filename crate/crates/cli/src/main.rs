//! `fraccal`: command-line driver for the fractional conductivity
//! laboratory.
//!
//! Exit status: 0 on success, 1 when a check or threshold fails, 2 on
//! usage or configuration errors.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fraccal::stability::ModulusModel;

use commands::Common;
use error::{CliError, CliResult};

/// Environment variable that sets the worker count when `--threads` is absent.
const THREADS_ENV: &str = "FRACCAL_THREADS";

#[derive(Parser, Debug)]
#[command(name = "fraccal", version, about = "Numerical laboratory for the fractional conductivity inverse problem")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Seed for random draws; overrides the configuration's `seed`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads (default: FRACCAL_THREADS, then all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suite and report residuals.
    Verify,
    /// Run a stability sweep over an amplitude ladder and fit a modulus.
    Sweep,
    /// Fit a modulus of continuity to an existing records file.
    Fit {
        /// `records.csv` written by `sweep`.
        #[arg(long, value_name = "PATH")]
        records: PathBuf,
        /// Modulus model to fit.
        #[arg(long, value_enum, default_value_t = Model::Log)]
        model: Model,
        /// Interpolation exponent for the reduction envelope.
        #[arg(long)]
        theta0: Option<f64>,
    },
    /// Reconstruct the conductivity from a DN block.
    Reconstruct {
        /// Measured block, as written to `dn_block.csv` by `dnmap`.
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Compute the DN map of `gamma1` and write its windowed block.
    Dnmap {
        /// Relative amplitude of uniform noise added to the block.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Evaluate the unique-continuation probe on the configured fields.
    UcpProbe,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Log,
    Loglog,
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let common = Common { config: cli.config, out: cli.out, seed: cli.seed };
    match cli.command {
        Command::Verify => commands::verify::run(&common),
        Command::Sweep => commands::sweep::run(&common),
        Command::Fit { records, model, theta0 } => {
            let model = match model {
                Model::Log => ModulusModel::Log,
                Model::Loglog => ModulusModel::LogLog,
            };
            commands::fit::run(&common, &records, model, theta0)
        }
        Command::Reconstruct { data } => commands::reconstruct::run(&common, &data),
        Command::Dnmap { noise } => commands::dnmap::run(&common, noise),
        Command::UcpProbe => commands::ucp::run(&common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // a panic is a bug, but it must still surface as a clean exit status
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("fraccal: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("fraccal: internal error");
            ExitCode::from(1)
        }
    }
}
