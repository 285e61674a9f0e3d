//! `hpl`: command-line front end for recursion schemes and pushdown automata.
//!
//! Exit codes: 0 success, 1 the checked property fails or the input is
//! refused as not incrementally bound, 2 unreadable or malformed input
//! (including bad flags), 3 internal machine error.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Directory searched for input files that do not exist as given.
pub const FIXTURE_DIR_VAR: &str = "HPL_FIXTURE_DIR";

#[derive(Debug, Parser)]
#[command(name = "hpl", version, about = "Recursion schemes and higher-order pushdown automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Sexp,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Rewrite,
    Cpda,
    Pda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Predicate {
    Safe,
    Homogeneous,
    Ib,
    All,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Input file.
    pub file: PathBuf,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, clap::Args)]
pub struct Derive {
    /// Derive the automaton even if the scheme is not incrementally bound.
    #[arg(long)]
    pub force: bool,
    /// Replace prime-lambda collapses by the order-based pop as well.
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report homogeneity, safety, incremental binding and dead rules.
    Check {
        #[command(flatten)]
        common: Common,
        /// Property that decides the exit code.
        #[arg(long, value_enum, default_value_t = Predicate::Safe)]
        predicate: Predicate,
    },
    /// Print a prefix of the generated tree.
    Tree {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Rewrite)]
        engine: Engine,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Steps allowed per branch.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Explore branches on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        derive: Derive,
    },
    /// Print the normalized pushdown automaton of a scheme.
    ToPda {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        derive: Derive,
    },
    /// Translate a pushdown automaton file into a scheme.
    ToHors {
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild a scheme as a safe one and compare the two trees.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        derive: Derive,
    },
    /// Check every reachable configuration of the scheme's automaton.
    Monitor {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
    /// Run the collapsible automaton and its pushdown simulation side by side.
    Lockstep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2_000)]
        steps: usize,
        #[command(flatten)]
        derive: Derive,
    },
    /// Views and justified log along one run.
    Views {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Picks the branch followed at each output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the computation graph.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Draw binder edges.
        #[arg(long)]
        binders: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { common, predicate } => commands::check(&common, predicate),
        Command::Tree {
            common,
            engine,
            depth,
            budget,
            sequential,
            derive,
        } => commands::tree(&common, engine, depth, budget, sequential, derive),
        Command::ToPda { common, derive } => commands::to_pda(&common, derive),
        Command::ToHors { common } => commands::to_hors(&common),
        Command::Roundtrip {
            common,
            depth,
            budget,
            derive,
        } => commands::roundtrip(&common, depth, budget, derive),
        Command::Monitor { common, steps } => commands::monitor(&common, steps),
        Command::Lockstep { common, steps, derive } => commands::lockstep(&common, steps, derive),
        Command::Views { common, steps, seed } => commands::views(&common, steps, seed),
        Command::Graph { common, binders } => commands::graph(&common, binders),
    };
    match result {
        Ok(out) => {
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().write_all(out.text.as_bytes());
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("hpl: {}", e);
            ExitCode::from(e.code())
        }
    }
}
