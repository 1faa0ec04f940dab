use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use localized_epr::cli::{self, Command, Options, OutputFormat};

/// Localized relativistic EPR spin correlations.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate C(a, b) at the configured point.
    Correlate(Common),
    /// Evaluate C(a, b) over the configured sweep axes.
    Sweep(Common),
    /// Evaluate the CHSH combination.
    Chsh(Common),
    /// Check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Monte Carlo seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Add a per-row wall-time column.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (command, common) = match args.command {
        Cmd::Correlate(c) => (Command::Correlate, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Chsh(c) => (Command::Chsh, c),
        Cmd::Validate { config } => {
            let code = cli::execute(Command::Validate, &config, &Options::default(), &mut std::io::stderr());
            return ExitCode::from(code as u8);
        }
    };
    let opts = Options {
        jobs: common.jobs,
        seed: common.seed,
        output: common.output,
        format: common.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
        timing: common.timing,
    };
    let code = cli::execute(command, &common.config, &opts, &mut std::io::stderr());
    ExitCode::from(code as u8)
}
