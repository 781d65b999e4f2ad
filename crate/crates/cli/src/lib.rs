//! Library side of the `capgen` binary: argument definitions, the record
//! file format, the repetition-ratio experiment harness and the
//! subcommand implementations, kept callable from integration tests.

pub mod args;
pub mod commands;
pub mod exit;
pub mod experiment;
pub mod record;

use args::{Cli, Command};
use exit::CliError;

/// Number of worker threads: explicit flag, then the CAPGEN_THREADS
/// environment variable, then available parallelism.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.filter(|&t| t > 0)
        .or_else(|| {
            std::env::var("CAPGEN_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&t| t > 0)
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
        })
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(cli.threads))
        .build()
        .map_err(|e| CliError::Infeasible(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Gen(a) => commands::cmd_gen(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Experiment(a) => commands::cmd_experiment(a),
        Command::Enumerate(a) => commands::cmd_enumerate(a),
        Command::Dual(a) => commands::cmd_dual(a),
    })
}
