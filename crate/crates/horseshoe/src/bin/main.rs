use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use horseshoe::runner;
use horseshoe::Error;

/// Dimension and spectrum computations for symbolic horseshoes.
#[derive(Parser)]
#[command(name = "horseshoe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts (default: current directory).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Unstable and stable dimensions of the thresholded system.
    Dims(Common),
    /// Dimension curve t -> (D_u(t), D_s(t)) over the configured grid.
    Curve(Common),
    /// Slice of the Markov or Lagrange spectrum with its box dimension.
    Spectrum(Common),
    /// Threshold-pruned subhorseshoe decomposition.
    Prune(Common),
    /// Suspension-flow reduction and dimension consistency checks.
    SuspendCheck(Common),
    /// Regularity, perturbation search and transversality diagnostics.
    Perturb(Common),
    /// Built-in invariant suite against the configured system.
    Selftest(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Dims(c) => ("dims", c),
        Command::Curve(c) => ("curve", c),
        Command::Spectrum(c) => ("spectrum", c),
        Command::Prune(c) => ("prune", c),
        Command::SuspendCheck(c) => ("suspend-check", c),
        Command::Perturb(c) => ("perturb", c),
        Command::Selftest(c) => ("selftest", c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", common.config.display(), e);
            return ExitCode::from(2);
        }
    };
    match runner::run(name, &text, &common.out) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {}", w);
            }
            for (k, v) in &outcome.summary {
                println!("{}: {}", k, v);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: selftest failed");
                ExitCode::from(1)
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("error: invalid configuration: {}", msg);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(3)
        }
    }
}
