use std::path::PathBuf;
use std::process::ExitCode;

use abcdic_cli::{execute, CliError, Command, RunOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abcdic", version, about = "ABC inference and DIC model selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Simulate a reference table.
    Simulate(Common),
    /// Rejection and regression adjustment; writes the posterior samples.
    Infer(Common),
    /// Both DIC variants for every model.
    Dic(Common),
    /// Posterior predictive checks of every statistic.
    Predcheck(Common),
    /// Posterior model probabilities and Bayes factors.
    Modelprob(Common),
    /// Full pipeline with selection frequencies over replicates.
    Experiment(Common),
    /// DIC for a list of models that differ only in their priors.
    Scan(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Root seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the bundle.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores). ABCDIC_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// Reference table CSV to use instead of simulating one.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Replace a non-empty output directory.
    #[arg(long)]
    force: bool,
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var("ABCDIC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("ABCDIC_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => match flag {
            Some(0) => Err(CliError::Config("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        // fails only when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_: Option<usize>) {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Simulate(c) => (Command::Simulate, c),
        Sub::Infer(c) => (Command::Infer, c),
        Sub::Dic(c) => (Command::Dic, c),
        Sub::Predcheck(c) => (Command::Predcheck, c),
        Sub::Modelprob(c) => (Command::Modelprob, c),
        Sub::Experiment(c) => (Command::Experiment, c),
        Sub::Scan(c) => (Command::Scan, c),
    };
    let result = threads(common.threads).and_then(|n| {
        configure_threads(n);
        let opts = RunOptions {
            config: common.config,
            seed: common.seed,
            out: common.out,
            table: common.table,
            force: common.force,
        };
        execute(command, &opts)
    });
    match result {
        Ok(report) => {
            eprintln!(
                "abcdic {command}: {} observation(s), bundle written",
                report.observations.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("abcdic {command}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
