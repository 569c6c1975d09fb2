//! `kempkit`: critical pairs, connectivities and hyper-atoms in small
//! abelian groups.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "kempkit", version, about = "Exact additive combinatorics on small finite abelian groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for sweeps (defaults to all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Group spec, e.g. `Z6` or `Z2xZ4`.
    #[arg(long)]
    pub group: String,
    /// First set: indices `0,1,3` or tuples `(0,1),(1,3)`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Condition (I), sumset data and a condition-(II) certificate for a pair.
    Analyze {
        #[command(flatten)]
        pair: PairArgs,
        /// Accept SP4 over subgroups of any order.
        #[arg(long)]
        sp4_any_order: bool,
        /// Write the certificate (kcert/1) to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connectivity kappa_k, fragments and atoms of a connection set.
    Kappa {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Hyper-atom of a connection set and the shape of its image modulo it.
    Hyperatom {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    /// Quasi-period or strict elementary pair for an aperiodic critical pair.
    Dichotomy {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Sweep all groups up to an order and certify every critical pair.
    Census {
        #[arg(long)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Pairs drawn per group when sampling.
        #[arg(long, default_value_t = kempkit::oracles::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSONL destination, one record per line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit records for pairs without condition (I) too.
        #[arg(long)]
        all_pairs: bool,
        #[arg(long)]
        sp4_any_order: bool,
    },
    /// Re-check a stored certificate.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sp4_any_order: bool,
    },
    /// Run one brute-force theorem verifier.
    Oracle {
        #[arg(value_enum)]
        theorem_id: Theorem,
        #[arg(long)]
        group: String,
        /// For `kemperman`: accept SP4 over subgroups of any order.
        #[arg(long)]
        sp4_any_order: bool,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Theorem {
    Kneser,
    Scherk,
    Vosper,
    Kemperman,
    Dichotomy,
    Isoperimetry,
}

/// Exit status and message of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<kempkit::Error> for Failure {
    fn from(e: kempkit::Error) -> Failure {
        match e {
            kempkit::Error::TheoremFalsified(_) | kempkit::Error::InternalInvariant(_) => {
                Failure::violation(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::usage(format!("I/O error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: cannot start {jobs} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command, cli.format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
