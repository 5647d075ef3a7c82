//! Command-line front end for the `photon_reader` analyses.
//!
//! Every subcommand resolves its options (flags, then `--config`, then
//! defaults), computes a [`report::Report`] and renders it as CSV, JSON or
//! SVG. The resolved options are embedded in every output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

use std::io::Write;
use std::process::ExitCode;

pub use args::{Cli, Command, Flags, Format};
pub use config::RunConfig;
pub use error::{CliError, Result};

/// Environment variable capping the rayon worker count; 0 or unset means
/// one thread per core.
pub const THREADS_ENV: &str = "PHOTON_READER_THREADS";

pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a thread count, got {raw:?}")))?;
    if n > 0 {
        // Only fails if a pool already exists, which keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one invocation and writes its output. Failing rows are listed on
/// stderr after the output is written, and turn the exit code to 1.
pub fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = RunConfig::resolve(cli.command, &cli.flags)?;
    let report = commands::run_command(&cfg)?;
    let text = report.render(&cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            for note in &report.notes {
                eprintln!("{note}");
            }
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if report.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &report.failures {
            eprintln!("failed: {f}");
        }
        Ok(ExitCode::from(1))
    }
}
