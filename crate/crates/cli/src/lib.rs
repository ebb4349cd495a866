//! Experiment harness for ABC inference and DIC model selection.
//!
//! A run reads one JSON config, builds (or loads) a reference table, analyses
//! every observed data set and writes a bundle of JSON and CSV files. The
//! same config and root seed always produce byte-identical bundles.

pub mod analysis;
pub mod bundle;
pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod registry;
pub mod table_io;

use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use experiment::{run, Command, Report};

/// Inputs shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub table: Option<PathBuf>,
    pub force: bool,
}

/// Load the config, apply command-line overrides, run and write the bundle.
pub fn execute(command: Command, opts: &RunOptions) -> CliResult<Report> {
    let mut config = ExperimentConfig::load(&opts.config)?;
    if let Some(seed) = opts.seed {
        config.root_seed = seed;
    }
    if let Some(table) = &opts.table {
        config.table.path = Some(table.clone());
    }
    let report = run(command, config)?;
    bundle::write_bundle(&opts.out, &bundle::bundle_files(&report), opts.force)?;
    Ok(report)
}
