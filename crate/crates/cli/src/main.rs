//! `tanglebound` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 a verify/search finding backed by
//! exact concurrences, 3 I/O or parse failure.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use tanglebound::bounds::SLACK_TOLERANCE;
use tanglebound::verify::{SearchConfig, StateSource};

use commands::{Format, VerifyArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl From<tanglebound::Error> for CliError {
    fn from(e: tanglebound::Error) -> Self {
        use tanglebound::Error::*;
        match e {
            Io(_) | Parse(_) | InvariantViolation(_) => CliError::Input(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub enum Outcome {
    Success,
    Finding,
}

#[derive(Debug, Parser)]
#[command(name = "tanglebound", version)]
#[command(about = "Evaluate and verify tangle and concurrence bounds after one-sided channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    Haar,
    SchmidtSimplex,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every bound for one channel and input state
    Eval {
        #[arg(long)]
        dim: usize,
        /// name[:p1,p2,...], e.g. amplitude_damping:0.5 or random:2,7
        #[arg(long)]
        channel: String,
        /// schmidt:w1,w2,... | haar:seed | file:path
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sweep the first channel parameter and emit one CSV row per value
    Sweep {
        #[arg(long)]
        dim: usize,
        /// Family name, optionally followed by fixed trailing parameters
        #[arg(long)]
        channel: String,
        /// start:stop:step
        #[arg(long)]
        param: String,
        #[arg(long)]
        state: String,
    },
    /// Monte Carlo verification over random channels and states
    Verify {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Trials per dimension
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SLACK_TOLERANCE, allow_hyphen_values = true)]
        tolerance: f64,
        /// Inclusive Kraus-count range lo:hi (default 1:d²)
        #[arg(long, value_parser = parse_kraus_range)]
        kraus_range: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value = "haar")]
        state_source: Source,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Minimize one entry's slack with random-restart Nelder–Mead
    Search {
        #[arg(long)]
        entry: String,
        #[arg(long)]
        dim: usize,
        /// Total objective evaluations
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        kraus: Option<usize>,
        /// Nelder–Mead iterations per restart
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = SLACK_TOLERANCE, allow_hyphen_values = true)]
        tolerance: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Recompute a stored report or counterexample and check its slacks
    Replay { file: PathBuf },
}

fn parse_kraus_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
    Ok((lo, hi))
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eval {
            dim,
            channel,
            state,
            format,
        } => commands::eval(dim, &channel, &state, format),
        Command::Sweep {
            dim,
            channel,
            param,
            state,
        } => commands::sweep(dim, &channel, &param, &state),
        Command::Verify {
            dims,
            trials,
            seed,
            tolerance,
            kraus_range,
            state_source,
            out_dir,
        } => commands::verify(VerifyArgs {
            dims,
            trials,
            seed,
            tolerance,
            kraus_range,
            state_source: match state_source {
                Source::Haar => StateSource::Haar,
                Source::SchmidtSimplex => StateSource::SchmidtSimplex,
            },
            out_dir,
        }),
        Command::Search {
            entry,
            dim,
            budget,
            seed,
            kraus,
            steps,
            tolerance,
            out_dir,
        } => {
            let mut cfg = SearchConfig::new(&entry, dim, budget, seed);
            cfg.kraus_count = kraus;
            cfg.steps_per_restart = steps;
            cfg.tolerance = tolerance;
            commands::search(cfg, out_dir.as_deref())
        }
        Command::Replay { file } => commands::replay_file(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Finding) => ExitCode::from(2),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
