use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use catoptron::experiments::{run_experiment, Command, ExperimentConfig, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    KerrCompare,
    JcOptimize,
    QslScan,
    DissipativeReoptimize,
    Propagate,
    Analyze,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::KerrCompare => Command::KerrCompare,
            Cmd::JcOptimize => Command::JcOptimize,
            Cmd::QslScan => Command::QslScan,
            Cmd::DissipativeReoptimize => Command::DissipativeReoptimize,
            Cmd::Propagate => Command::Propagate,
            Cmd::Analyze => Command::Analyze,
        }
    }
}

/// Krotov optimal control towards cat and entangled cat states.
///
/// The configuration file is JSON and overrides the command's preset key by
/// key. Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Size of the worker pool for sweeps.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let overrides = Overrides {
        seed: cli.seed,
        output_dir: cli.out,
        workers: cli.workers,
    };
    let result = ExperimentConfig::load(cli.command.into(), &cli.config, &overrides)
        .and_then(|cfg| run_experiment(&cfg).map(|r| (cfg, r)));
    match result {
        Ok((cfg, _)) => {
            println!("{}", cfg.output_dir.join("report.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
