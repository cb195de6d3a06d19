//! `banachlab` command-line front end.
//!
//! Every subcommand prints or writes a JSON artifact that embeds the run
//! configuration and the tool version. Exit codes: 0 on success, 2 on invalid
//! input or failed preconditions, 3 when a budget or resource limit is hit.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Experiments on basis constants, renormings and symmetric separation.
#[derive(Debug, Parser)]
#[command(name = "banachlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Optimizer overrides, e.g. `restarts=8,iters=200,tol=1e-9`.
    #[arg(long)]
    pub budget: Option<String>,
    /// Seed for every randomized component.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the exact rational path where one exists.
    #[arg(long)]
    pub exact: bool,
    /// Artifact path (JSON); CSV companions are written next to it.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Evaluates the norm of one vector.
    Norm {
        /// Space shorthand (`l1`, `lp:1.5`, `tsirelson-Tstar`, ...), JSON, or a JSON file.
        #[arg(long)]
        space: String,
        /// Optional renorm layered on the space (JSON or file).
        #[arg(long)]
        renorm: Option<String>,
        /// Vector as `{"coords":[[i,x],...]}` or a file.
        #[arg(long)]
        vec: String,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Projection and tail-projection norms of a finite basic sequence.
    Profile {
        /// Space shorthand, JSON, or a JSON file.
        #[arg(long)]
        space: String,
        /// Optional renorm (JSON or file).
        #[arg(long)]
        renorm: Option<String>,
        /// List of vectors (JSON array or `{"vectors":[...]}`), inline or a file.
        #[arg(long)]
        vecs: String,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Nested selection of an asymptotically monotone subsequence.
    Select {
        /// Named source (`orthonormal-l2`, `perturbed-l2`, `lp-basis:p`, `block-l1`) or JSON.
        #[arg(long)]
        source: String,
        /// Comma-separated list or `geometric:r`.
        #[arg(long)]
        epsilons: String,
        /// Number of selection stages.
        #[arg(long, default_value_t = 6)]
        stages: usize,
        /// Heuristic safety fraction withheld from each δ.
        #[arg(long, default_value_t = 0.1)]
        guard: f64,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Evaluates a renorm on probe vectors with sandwich and premise reports.
    Renorm {
        /// Base space.
        #[arg(long)]
        space: String,
        #[arg(long)]
        renorm: String,
        /// Probe vectors.
        #[arg(long)]
        vecs: String,
        /// Random samples for the sandwich and premise estimates.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Truncation dimension of the random samples.
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Symmetric separation certificate of a finite set.
    Separate {
        /// Space shorthand, JSON, or a JSON file.
        #[arg(long)]
        space: String,
        /// Optional renorm (JSON or file).
        #[arg(long)]
        renorm: Option<String>,
        /// List of vectors, inline or a file.
        #[arg(long)]
        vecs: String,
        /// Also report whether the set is symmetrically `delta`-separated.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Lower bound for the symmetric Kottman constant of a truncation.
    Kottman {
        /// Space shorthand, JSON, or a JSON file.
        #[arg(long)]
        space: String,
        /// Optional renorm (JSON or file).
        #[arg(long)]
        renorm: Option<String>,
        /// Number of unit vectors.
        #[arg(long)]
        k: usize,
        /// Truncation dimension.
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Exact norms of `eᵢ ± eⱼ` in the Tsirelson space and its dual.
    TsirelsonTable {
        /// Largest basis index in the table.
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Norm { common, .. }
            | Command::Profile { common, .. }
            | Command::Select { common, .. }
            | Command::Renorm { common, .. }
            | Command::Separate { common, .. }
            | Command::Kottman { common, .. }
            | Command::TsirelsonTable { common, .. } => common,
        }
    }
}

fn threads_from_env() -> Result<usize, banachlab::Error> {
    match std::env::var("BANACHLAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| banachlab::Error::Parameter(format!("BANACHLAB_THREADS = {v:?} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = threads_from_env().and_then(|t| banachlab::par::with_threads(t, || commands::run(&cli.command))).and_then(|r| r);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
