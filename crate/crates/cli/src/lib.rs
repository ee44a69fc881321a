//! Command-line harness for `gcurkit`: matrix file I/O, decomposition
//! commands, seeded experiments and report emission.

pub mod args;
pub mod commands;
pub mod error;
pub mod experiments;
pub mod io;
pub mod plot;
pub mod report;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_USAGE};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "GCURKIT_THREADS";

fn thread_count() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(CliError::Usage(format!("{THREADS_ENV}: {e}"))),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gsvd(a) => commands::cmd_gsvd(a, &cli.output),
        Command::Cur(a) => commands::cmd_cur(a, &cli.output),
        Command::Gcur(a) => commands::cmd_gcur(a, &cli.output),
        Command::Experiment(a) => commands::cmd_experiment(a, &cli.output),
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("gcurkit: {e}");
            e.exit_code()
        }
    }
}
