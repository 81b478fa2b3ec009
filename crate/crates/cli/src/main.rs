mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunArgs, RunConfig, UsageError};

pub const THREADS_ENV: &str = "RIDGEPATH_THREADS";

/// Univariate spline smoothing followed by generalized ridge regression
/// along the efficient shrinkage path.
#[derive(Debug, Parser)]
#[command(name = "ridgepath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smooth y on each predictor; write the 2p+1 column frame and fit JSONs
    Smooth(RunArgs),
    /// Fit the linear and/or np model; write traces, SVGs and the comparison report
    Fit(RunArgs),
    /// Correlations of y with the predictors and with their smooths
    Corr(RunArgs),
    /// Where to get the county mortality data and which columns it has
    FetchInstructions,
}

fn thread_count() -> Result<usize, UsageError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            UsageError(format!(
                "{THREADS_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let threads = thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    pool.install(|| match &cli.command {
        Command::Smooth(a) => commands::cmd_smooth(&RunConfig::resolve(a)?),
        Command::Fit(a) => commands::cmd_fit(&RunConfig::resolve(a)?),
        Command::Corr(a) => commands::cmd_corr(&RunConfig::resolve(a)?),
        Command::FetchInstructions => {
            print!("{}", commands::FETCH_INSTRUCTIONS);
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
