//! Command-line front end for the body-field activity toolkit.
//!
//! Three subcommands cover the whole workflow: `simulate` synthesises a
//! labelled dataset from an activity script, `validate` checks dataset files,
//! and `run` executes a configured experiment grid and writes reports.
//!
//! Exit codes: 0 success, 1 data validation or parse failure, 2
//! configuration error, 3 I/O or other runtime failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bodyfield_core::error::Error;

use crate::config::{RunConfig, DATA_ROOT_ENV};

#[derive(Parser)]
#[command(
    name = "bodyfield",
    version,
    about = "Synthesise, validate and evaluate body-potential + accelerometer activity datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise agent sessions from an activity script
    Simulate {
        /// Activity script (TOML)
        #[arg(long)]
        script: PathBuf,
        /// Simulation constants (TOML); built-in defaults when omitted
        #[arg(long = "sim-config")]
        sim_config: Option<PathBuf>,
        /// Output dataset directory
        #[arg(long)]
        out: PathBuf,
        /// Override the noise seed of the simulation
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check every session file of a dataset
    Validate {
        /// Dataset directory
        #[arg(long)]
        data: PathBuf,
    },
    /// Run the experiment grid of a run configuration
    Run {
        /// Run configuration (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Override the configured seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured worker-thread count
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Validation(_) | Error::Parse { .. } => 1,
        Error::Config(_) | Error::InvalidArgument(_) => 2,
        Error::Io { .. } => 3,
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            script,
            sim_config,
            out,
            seed,
        } => commands::cmd_simulate(&script, sim_config.as_deref(), &out, seed),
        Command::Validate { data } => commands::cmd_validate(&data),
        Command::Run {
            config,
            seed,
            out,
            workers,
        } => {
            let mut run_config = RunConfig::load(&config)?;
            if let Ok(root) = std::env::var(DATA_ROOT_ENV) {
                run_config.dataset_root = PathBuf::from(root);
            }
            if let Some(seed) = seed {
                run_config.seed = seed;
            }
            if let Some(out) = out {
                run_config.out_dir = out;
            }
            if let Some(workers) = workers {
                run_config.workers = workers;
            }
            run_config.validate()?;
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(run_config.workers)
                .build_global()
            {
                log::warn!("worker pool already initialised: {e}");
            }
            commands::cmd_run(&run_config)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
