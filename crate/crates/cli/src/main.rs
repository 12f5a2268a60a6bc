//! `stit`: command-line front end for the stit logic toolkit.
//!
//! Exit codes: 0 on success, 1 on a negative verdict (unsatisfiable, not
//! valid, false, violation, not found), 2 on usage or I/O errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "stit", version, about = "Multi-agent Chellas stit logic toolkit")]
pub struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for bounded searches.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Bound {
    /// Maximal number of histories in searched frames.
    #[arg(long, env = "STIT_DEFAULT_BOUND", default_value_t = 3)]
    pub bound: usize,
    /// Allow bounds of 4 or more.
    #[arg(long)]
    pub large: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Model file (JSON).
    #[arg(long, conflicts_with = "frame")]
    pub model: Option<PathBuf>,
    /// Choice frame file (JSON), read as its root-plus-leaves model.
    #[arg(long)]
    pub frame: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Pair {
    /// The two model files, left first.
    #[arg(long = "model", num_args = 1, required = true)]
    pub models: Vec<PathBuf>,
    /// Moment of the left model (default: its root).
    #[arg(long)]
    pub left: Option<String>,
    /// Moment of the right model (default: its root).
    #[arg(long)]
    pub right: Option<String>,
    /// Comma-separated variables (default: all variables of both models).
    #[arg(long)]
    pub vars: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rcip,
    Srcip,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Derivation {
    Counterexample,
    SCounterexample,
    Settled,
    Technical2,
    Technical3,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and print its canonical and core forms.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Evaluate a formula at a moment-history pair, or over the whole model.
    Mc {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        moment: Option<String>,
        #[arg(long)]
        history: Option<String>,
        #[arg(long)]
        formula: String,
    },
    /// Check HC, NBB, partition choice, NCUH and IA.
    ValidateModel {
        #[command(flatten)]
        source: Source,
    },
    /// Bounded satisfiability search.
    Sat {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Bounded validity check with countermodel extraction.
    Valid {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Check a history relation against the bisimulation clauses.
    Bisim {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Compute the largest relation satisfying atoms, forth and back.
    Maxbisim {
        #[command(flatten)]
        pair: Pair,
    },
    /// Check a proof script.
    Prove {
        #[arg(long)]
        script: PathBuf,
    },
    /// Emit a scripted derivation.
    Derive {
        #[arg(value_enum)]
        which: Derivation,
        /// Comma-separated agents.
        #[arg(long)]
        agents: Option<String>,
        /// Comma-separated variables.
        #[arg(long)]
        vars: Option<String>,
        /// Formula parameters, in order.
        #[arg(long)]
        formula: Vec<String>,
        /// Premise script.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Bounded search for an interpolant of A -> B.
    Interpolate {
        /// A then B.
        #[arg(long, num_args = 1, required = true)]
        formula: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Rcip)]
        mode: Mode,
        #[arg(long, default_value_t = 9)]
        size_bound: usize,
        #[command(flatten)]
        bound: Bound,
    },
    /// Bounded search for a formula separating two sets.
    Separate {
        #[arg(long, required = true)]
        gamma: Vec<String>,
        #[arg(long, required = true)]
        delta: Vec<String>,
        #[arg(long, default_value_t = 9)]
        size_bound: usize,
        #[command(flatten)]
        bound: Bound,
    },
    /// Rebuild the witness models and re-check both certificates.
    Reproduce {
        #[arg(long)]
        all: bool,
        /// Only the four-agent certificate.
        #[arg(long, conflicts_with = "all")]
        negative: bool,
        /// Only the two-agent certificate.
        #[arg(long, conflicts_with = "all")]
        strong: bool,
        /// Write models, relation, proofs and certificates here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

/// What a command reports: a verdict plus text and JSON renderings.
pub struct Report {
    pub positive: bool,
    pub text: String,
    pub json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
                );
            } else {
                print!("{}", report.text);
                if !report.text.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(if report.positive { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
