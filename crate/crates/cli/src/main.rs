//! Command-line driver for SYK entanglement-entropy experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syk_entropy::exact::LogBase;
use syk_entropy::experiment::{
    emit_gate_counts, emit_oracle, emit_results, gate_report, run_experiment, run_oracle, ExperimentConfig,
};
use syk_entropy::Error;

#[derive(Parser)]
#[command(name = "syk-entropy", version, about = "Rényi-2 entanglement growth in the SYK model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run both protocols and write results.csv with exact reference columns.
    Run(Common),
    /// Write exact reference curves only (oracle.csv).
    Oracle(Common),
    /// Write the gate-count report only (gate_counts.json).
    Counts(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    log2: bool,
}

/// Process exit codes by failure category.
mod exit {
    pub const CONFIG: u8 = 3;
    pub const IO: u8 = 4;
    pub const RUNTIME: u8 = 5;
}

fn category(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Config(_)
        | Error::InvalidParams(_)
        | Error::InvalidSubsystem(_)
        | Error::InvalidArgument(_)
        | Error::QubitOutOfRange { .. } => (exit::CONFIG, "config"),
        Error::Io { .. } => (exit::IO, "io"),
        _ => (exit::RUNTIME, "runtime"),
    }
}

fn load(args: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(w) = args.workers {
        cfg.executor.workers = Some(w);
    }
    if args.log2 {
        cfg.log_base = LogBase::Two;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: &Command) -> Result<Vec<PathBuf>, Error> {
    match command {
        Command::Run(args) => {
            let cfg = load(args)?;
            emit_results(&run_experiment(&cfg)?, &cfg.output_dir)
        }
        Command::Oracle(args) => {
            let cfg = load(args)?;
            emit_oracle(&cfg, &run_oracle(&cfg)?, &cfg.output_dir)
        }
        Command::Counts(args) => {
            let cfg = load(args)?;
            Ok(vec![emit_gate_counts(&gate_report(&cfg)?, &cfg.output_dir)?])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, name) = category(&e);
            eprintln!("error ({name}): {e}");
            ExitCode::from(code)
        }
    }
}
