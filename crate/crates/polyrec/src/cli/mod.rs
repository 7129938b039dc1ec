//! Command-line front end: subcommands over sequence documents, with both
//! an aligned human-readable report and a machine-readable JSON document
//! per invocation.
//!
//! Exit codes: 0 on success, 1 on domain errors (the stable error name is
//! printed in brackets), 2 on usage errors.

mod commands;

use std::ffi::OsString;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::automata::AutomataError;
use crate::cancelling::CancelError;
use crate::convert::ConvertError;
use crate::dsl::{DocError, ParseError};
use crate::engines::EngineError;
use crate::modular::ModularError;
use crate::normalize::NormalizeError;
use crate::poly::PolyError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{command} does not support `{kind}` documents")]
    UnsupportedKind {
        command: &'static str,
        kind: &'static str,
    },
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Cancel(#[from] CancelError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Io { .. } => "IoError",
            CliError::UnsupportedKind { .. } => "UnsupportedKind",
            CliError::Doc(e) => e.name(),
            CliError::Parse(e) => e.name(),
            CliError::Poly(e) => e.name(),
            CliError::Engine(e) => e.name(),
            CliError::Convert(e) => e.name(),
            CliError::Normalize(e) => e.name(),
            CliError::Modular(e) => e.name(),
            CliError::Cancel(e) => e.name(),
            CliError::Automata(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Symbolic,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeStep {
    Integerize,
    Homogenize,
    IntegerScale,
    Pipeline,
}

#[derive(Debug, Parser)]
#[command(
    name = "polyrec",
    about = "Exact tooling for linear, polynomial and rational recursive sequences",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a sequence document at an index.
    Eval {
        #[arg(long)]
        file: String,
        #[arg(long)]
        n: u64,
        /// Bit-size ceiling for intermediate values of system evaluation.
        #[arg(long)]
        max_bits: Option<u64>,
    },
    /// Convert between a single recurrence and a first-order system.
    Convert {
        #[arg(long)]
        file: String,
        /// Cross-check the conversion on indices 0..=N.
        #[arg(long, default_value_t = 40)]
        check: u64,
    },
    /// Make a system integer-initial, homogeneous and integer-coefficient.
    Normalize {
        #[arg(long)]
        file: String,
        #[arg(long, value_enum, default_value_t = NormalizeStep::Pipeline)]
        step: NormalizeStep,
        /// Target degree for homogenization (defaults to max(2, rule degree)).
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Reduce modulo a prime: exact state periodicity, projected output
    /// periodicity and a residue prefix (systems), or a bounded periodicity
    /// scan (oracles).
    ModAnalyze {
        #[arg(long)]
        file: String,
        #[arg(long)]
        prime: u64,
        /// Step bound for cycle detection (default: min(p^k + 1, 10^6)).
        #[arg(long)]
        cutoff: Option<u64>,
        /// Residue prefix length for oracle scans (default 200).
        #[arg(long)]
        window: Option<u64>,
    },
    /// Lengths of maximal runs of Catalan numbers divisible by a prime,
    /// observed against the predicted formula.
    CatalanBlocks {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 5)]
        count: u64,
    },
    /// Search for a window polynomial cancelling the sequence.
    FindCancelling {
        #[arg(long)]
        file: String,
        #[arg(long)]
        degree: u32,
        /// symbolic (exact, systems only) or empirical (sampled nullspace).
        #[arg(long, value_enum)]
        mode: Option<SearchMode>,
        /// Window offset count k for the empirical mode (poly in x0..xk).
        #[arg(long)]
        window: Option<usize>,
        /// Sample count for the empirical mode.
        #[arg(long)]
        samples: Option<u64>,
        /// Monomial budget for symbolic composition.
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Verify a window polynomial against a sequence.
    VerifyCancelling {
        #[arg(long)]
        file: String,
        /// Polynomial in window variables x0, x1, ...
        #[arg(long)]
        poly: String,
        /// Empirical sample count (oracle-style documents; default 100).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Fit a single polynomial recurrence u_{n+k} = P(u_n..u_{n+k-1}).
    FindSimple {
        #[arg(long)]
        file: String,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        samples: u64,
    },
    /// Rewrite a window polynomial against the n^n window as
    /// sum_i P_i(n)^n Q_i(n).
    NnDecompose {
        #[arg(long)]
        poly: String,
    },
    /// Refute a candidate cancelling polynomial for n^n by a congruence
    /// scan at a deterministically chosen prime.
    NnRefute {
        #[arg(long)]
        poly: String,
    },
    /// Evaluate a weighted automaton document.
    WaEval {
        #[arg(long)]
        file: String,
        #[arg(long)]
        n: u64,
    },
    /// Evaluate a weighted grammar document (raw length weight and the
    /// odd-length derivation-count view).
    WcfgEval {
        #[arg(long)]
        file: String,
        #[arg(long)]
        n: u64,
    },
    /// Evaluate a quantifier-fragment expression document.
    WmsoEval {
        #[arg(long)]
        file: Option<String>,
        /// Inline s-expression instead of a file.
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        n: u64,
    },
}

/// Captured invocation result: exit code plus rendered output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

/// Run the CLI on the given argument list and capture the outcome instead
/// of printing/exiting.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return Outcome {
                code,
                text: e.to_string(),
            };
        }
    };
    match commands::dispatch(cli.command, cli.format) {
        Ok(text) => Outcome { code: 0, text },
        Err(e @ CliError::Usage(_)) => Outcome {
            code: 2,
            text: format!("error[{}]: {}\n", e.name(), e),
        },
        Err(e) => Outcome {
            code: 1,
            text: format!("error[{}]: {}\n", e.name(), e),
        },
    }
}
