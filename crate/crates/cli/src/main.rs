//! `quorumlab` command-line front end.
//!
//! Exit codes: 0 ok, 1 closure failure, 2 usage or config error, 3 budget
//! exceeded, 4 oracle and closed form disagree.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quorumlab::{Budget, BuildOptions};

use output::Format;

#[derive(Parser)]
#[command(
    name = "quorumlab",
    version,
    about = "Build, verify, measure and simulate quorum wake-up schedules"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Write output to this path (a directory for `simulate`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for torus subfamily sampling, random picks and sweep self-checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration cap in basic tests; overrides QUORUMLAB_BUDGET.
    #[arg(long, global = true, env = "QUORUMLAB_BUDGET")]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
}

impl Global {
    pub fn budget(&self) -> Budget {
        match self.budget {
            Some(n) => Budget::with_max_tests(n),
            None => Budget::default(),
        }
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            seed: self.seed,
            budget: self.budget(),
            ..BuildOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a system, or one quorum of it, and show its layout.
    Build(commands::build::BuildArgs),
    /// Check rotational closure of one system or cross closure of two.
    Verify(commands::verify::VerifyArgs),
    /// Brute-force metrics under every convention next to the closed form.
    Metrics(commands::metrics::MetricsArgs),
    /// Metric rows for a range of sizes, as CSV.
    Sweep(commands::sweep::SweepArgs),
    /// Run a multi-node simulation from a JSON config.
    Simulate(commands::simulate::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Build(a) => commands::build::run(a, g),
        Command::Verify(a) => commands::verify::run(a, g),
        Command::Metrics(a) => commands::metrics::run(a, g),
        Command::Sweep(a) => commands::sweep::run(a, g),
        Command::Simulate(a) => commands::simulate::run(a, g),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
