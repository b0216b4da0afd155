//! `ldg`: run and verify logically decorated graph rewriting systems.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ldg_core::logic::LogicKind;
use ldg_core::strategy::StrategyError;
use ldg_core::verifier::VerifyError;

#[derive(Parser)]
#[command(name = "ldg", version, about = "Graph rewriting with decorated left-hand sides, and its verification")]
struct Cli {
    /// Write artifacts (graphs, formulas, counterexamples) to this directory
    /// instead of standard output.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Logic {
    Dl,
    Fol,
}

impl From<Logic> for LogicKind {
    fn from(l: Logic) -> Self {
        match l {
            Logic::Dl => LogicKind::Dl,
            Logic::Fol => LogicKind::Fol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply a sequence of elementary actions to a graph.
    Apply {
        graph: PathBuf,
        /// Actions separated by `;`, e.g. "mrg(i,j); del_C(k,A)".
        actions: String,
        /// Print Graphviz instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Run a strategy on a graph.
    Rewrite {
        graph: PathBuf,
        rules: PathBuf,
        strategy: String,
        /// Every outcome of every derivation instead of one run.
        #[arg(long, conflicts_with = "dot")]
        all: bool,
        /// Only injective matches.
        #[arg(long)]
        injective: bool,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Logic of closure invariants in the strategy.
        #[arg(long, value_enum, default_value = "dl")]
        logic: Logic,
        #[arg(long)]
        dot: bool,
    },
    /// Remove pending substitutions `phi[a]` from a formula.
    Eliminate {
        /// Formula text, or `@file`.
        formula: String,
        #[arg(long, value_enum, default_value = "dl")]
        logic: Logic,
        /// Also print every rewriting step.
        #[arg(long)]
        trace: bool,
        /// Fully parenthesized output.
        #[arg(long)]
        full: bool,
    },
    /// Weakest precondition of a strategy.
    Wp(CalcArgs),
    /// Verification condition of a strategy.
    Vc(CalcArgs),
    /// Check a specification by bounded search and sampled execution.
    Verify {
        spec: PathBuf,
        /// Active nodes for the bounded search; defaults to the spec's bound.
        #[arg(long)]
        bound_nodes: Option<usize>,
        /// Sampled graphs on which every derivation is run.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Derivation length limit during sampled execution.
        #[arg(long, default_value_t = 50)]
        step_bound: usize,
        /// Write the fully parenthesized correctness formula here.
        #[arg(long, value_name = "FILE")]
        emit_formula: Option<PathBuf>,
    },
    /// Bisimulation checks.
    #[command(subcommand)]
    Bisim(BisimCommand),
    /// Randomized check that eliminating `phi[a]` agrees with applying `a`.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per action kind and logic.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Restrict to one logic.
        #[arg(long, value_enum)]
        logic: Option<Logic>,
        /// Restrict to one action kind (add_N, del_N, ..., cl).
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(ldg_core::random::ACTION_KINDS))]
        kind: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(clap::Args)]
struct CalcArgs {
    rules: PathBuf,
    strategy: String,
    /// Postcondition text, or `@file`.
    post: String,
    #[arg(long, value_enum, default_value = "dl")]
    logic: Logic,
    /// Keep substitutions pending instead of eliminating them.
    #[arg(long)]
    pending: bool,
    #[arg(long)]
    full: bool,
}

#[derive(Subcommand)]
enum BisimCommand {
    /// Check whether a relation is a bisimulation between two interpretations.
    Check {
        left: PathBuf,
        right: PathBuf,
        relation: PathBuf,
        /// Logic features, e.g. QUOSelf or ALCQUO.
        #[arg(long, default_value = "QUOSelf")]
        features: String,
    },
    /// Show that substitution leaves the bisimulation-invariant fragment.
    DemoNonclosure,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Counterexample = 1,
    InputError = 2,
    Bound = 3,
}

fn bound_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        let strategy = |s: &StrategyError| {
            matches!(s, StrategyError::StepBoundExceeded(_) | StrategyError::BudgetExceeded(_))
        };
        e.downcast_ref::<StrategyError>().is_some_and(strategy)
            || e.downcast_ref::<VerifyError>().is_some_and(|v| match v {
                VerifyError::BudgetExceeded(_) => true,
                VerifyError::Strategy(s) => strategy(s),
                _ => false,
            })
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match commands::run(cli) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: {err:#}");
            if bound_error(&err) {
                Status::Bound
            } else {
                Status::InputError
            }
        }
    };
    ExitCode::from(status as u8)
}
