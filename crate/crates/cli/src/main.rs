//! `faultbasis` command-line tool.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use faultbasis::judgemetrics::{DEFAULT_CORRECT_K, DEFAULT_QUANTILE};
use faultbasis::prefilter::{DEFAULT_MIN_RANK, DEFAULT_TAU};
use faultbasis::wrongselect::{DEFAULT_MAX_STEPS, DEFAULT_RESTARTS};

#[derive(Debug, Parser)]
#[command(name = "faultbasis", version, about = "Select diverse wrong-code bases from judge verdicts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Input file; standard input when omitted.
    #[arg(long = "in", global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Records)]
    format: Format,
    /// Master seed.
    #[arg(long, global = true, env = "FAULTBASIS_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; all available cores when omitted.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Debug, Args, Clone, Copy)]
struct FilterArgs {
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_RANK)]
    min_rank: usize,
}

#[derive(Debug, Args, Clone, Copy)]
struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    steps: usize,
}

#[derive(Debug, Args, Clone, Copy)]
struct SynthArgs {
    #[arg(long, default_value_t = 1)]
    problems: usize,
    #[arg(long, default_value_t = 5)]
    planted_rank: usize,
    /// Rows that are GF(2) combinations of planted rows.
    #[arg(long, default_value_t = 10)]
    dependent: usize,
    #[arg(long, default_value_t = 0)]
    noise: usize,
    /// Number of golden tests.
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, default_value_t = 0.5)]
    overlap_bias: f64,
    /// Correct codes per problem (records output only).
    #[arg(long, default_value_t = 10)]
    correct: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pre-filter verdict matrices.
    Filter(FilterArgs),
    /// Select a maximally diverse row basis of each matrix.
    Select(SearchArgs),
    /// Select a basis, then the golden tests that keep it separable.
    ReduceTests(SearchArgs),
    /// Pass and hack rates of generated tests.
    Metrics {
        /// Pipeline report supplying each problem's basis codes.
        #[arg(long, value_name = "PATH")]
        basis: Option<PathBuf>,
    },
    /// Generate synthetic matrices with a planted basis.
    Synth(SynthArgs),
    /// Filter, select and reduce every problem of a verdict-record corpus.
    Pipeline {
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = DEFAULT_QUANTILE)]
        quantile: f64,
        #[arg(long, default_value_t = DEFAULT_CORRECT_K)]
        correct_k: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("faultbasis: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let output = pool.install(|| commands::dispatch(&cli.command, &cli.common))?;
    commands::write_output(cli.common.out.as_deref(), &output)
}
