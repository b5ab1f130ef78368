use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decograph::cli::{self, Command, Overrides};

#[derive(Parser)]
#[command(
    name = "decograph",
    version,
    about = "Bayesian structure learning over decomposable Gaussian graphical models"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config file (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override chain.seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override output.dir
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override chain.chains
    #[arg(long, global = true)]
    chains: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Sample graphs from the prior alone
    SamplePrior,
    /// Run the posterior sampler on the training rows
    Fit,
    /// Model-averaged predictive score of the test rows
    Predict,
    /// Exact distribution over all decomposable graphs (small n)
    Enumerate,
    /// Diagnostics of a completed fit
    Summarize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(config) = args.config else {
        eprintln!("error: --config <FILE> is required");
        return ExitCode::from(2);
    };
    let command = match args.command {
        Cmd::SamplePrior => Command::SamplePrior,
        Cmd::Fit => Command::Fit,
        Cmd::Predict => Command::Predict,
        Cmd::Enumerate => Command::Enumerate,
        Cmd::Summarize => Command::Summarize,
    };
    let overrides = Overrides { seed: args.seed, out: args.out, chains: args.chains };
    match cli::run(command, &config, &overrides) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
