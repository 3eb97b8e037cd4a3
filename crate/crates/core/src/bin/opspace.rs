use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opspace::experiments::{
    run_suite, ExperimentConfig, Format, Suite, DEFAULT_BUDGET, DEFAULT_MAX_N, DEFAULT_SAMPLES,
};
use opspace::Budget;

/// Runs the operator-space experiment suites and reports every check.
#[derive(Parser)]
#[command(name = "opspace", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Master seed; the OPSPACE_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_N, value_parser = positive)]
    max_n: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET.restarts, value_parser = positive)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET.iterations, value_parser = positive)]
    iters: usize,
    /// Random instances per sampled check.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = positive)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run suites and searches on all cores.
    #[arg(long)]
    parallel: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn seed_from_env(flag: u64) -> Result<u64, String> {
    match std::env::var("OPSPACE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| format!("OPSPACE_SEED is not a 64-bit unsigned integer: {s:?}")),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(format!("OPSPACE_SEED: {e}")),
    }
}

fn run(args: RunArgs) -> Result<bool, String> {
    let cfg = ExperimentConfig {
        suite: args.suite,
        seed: seed_from_env(args.seed)?,
        max_n: args.max_n,
        budget: Budget { restarts: args.restarts, iterations: args.iters },
        samples: args.samples,
        format: args.format,
        output_path: args.out,
        parallel: args.parallel,
    };
    let report = run_suite(&cfg).map_err(|e| e.to_string())?;
    if cfg.output_path.is_none() {
        let text = report.render(cfg.format).map_err(|e| e.to_string())?;
        std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    }
    if let Some(case) = &report.first_failure {
        eprintln!("opspace: failed: {case}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opspace: error: {e}");
            ExitCode::from(2)
        }
    }
}
