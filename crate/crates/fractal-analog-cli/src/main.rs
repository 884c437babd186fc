//! Command-line front end: encode/decode files, run distortion sweeps, and
//! emit bound, capacity and stretch-factor curves as CSV.

// Domain guards are written `!(x > 0.0)` so NaN arguments fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<fractal_analog::Error> for CliError {
    fn from(e: fractal_analog::Error) -> Self {
        Self(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "fractal-analog",
    version,
    about = "Analog joint source-channel codes: encode, decode, sweep, and curve export"
)]
struct Cli {
    /// Configuration file with flat `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for Monte Carlo sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file of source samples (one real per line) into channel symbols.
    Encode { input: PathBuf },
    /// Decode a file of channel symbols back into source estimates.
    Decode { input: PathBuf },
    /// Monte Carlo distortion-vs-SNR sweep.
    Sweep,
    /// Analytic distortion bound curves.
    Bounds,
    /// Binary-input capacity curves.
    Capacity,
    /// Codeword-map sweep and expected stretch factor estimates.
    Stretch {
        /// Output file for the stretch-factor table (stdout when omitted).
        #[arg(long)]
        dj_out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::new("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(format!("cannot size the thread pool: {e}")))?;
    }
    let mut settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    if let Some(seed) = cli.seed {
        settings.set("seed", seed);
    }
    match &cli.command {
        Command::Encode { input } => commands::encode(&mut settings, input, cli.out.as_deref()),
        Command::Decode { input } => commands::decode(&mut settings, input, cli.out.as_deref()),
        Command::Sweep => commands::sweep(&mut settings, cli.out.as_deref()),
        Command::Bounds => commands::bounds(&mut settings, cli.out.as_deref()),
        Command::Capacity => commands::capacity(&mut settings, cli.out.as_deref()),
        Command::Stretch { dj_out } => {
            commands::stretch(&mut settings, cli.out.as_deref(), dj_out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
