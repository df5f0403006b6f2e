//! `fdepth`: batch front end for partition orders, generator functions,
//! Fisher information bounds and the verification suites.

mod commands;
mod output;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "fdepth", version, about = "Generator-function entanglement depths and Fisher information bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All partitions of n with h, w, r, t and s2 columns.
    Partitions {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Hasse diagram of the refinement or dominance order.
    Hasse {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Order::Refinement)]
        order: Order,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Values of a generator function on every partition of n.
    GenfunTable {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        f: GenFunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Brute-force bound curve b_f(k) with closed forms where known.
    Bounds {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        f: GenFunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Strictness of the bound curve and its step count.
    Usefulness {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        f: GenFunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Depths of an ensemble of finest separating types read from JSON.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        f: GenFunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fisher information of a state read from JSON and the levels it excludes.
    Witness {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        f: GenFunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Runs verification suites and prints a JSON summary.
    Verify {
        /// One of orders, monotonicity, limits, bounds, qfi, depth, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra generator functions for the monotonicity suite.
        #[arg(long = "f")]
        extra: Vec<String>,
        /// Skip the parameter range guard for the extra functions.
        #[arg(long)]
        unchecked: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenFunArgs {
    /// Generator function spec, e.g. `width`, `s_q:q=2`, `compose:neglog2:s_q:q=2`.
    #[arg(long = "f", default_value = "width")]
    spec: String,
    /// Skip the parameter range guard.
    #[arg(long)]
    unchecked: bool,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Refinement,
    Dominance,
}

/// Why a command could not produce its output.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    pub fn usage(e: impl Display) -> Self {
        Self::Usage(e.to_string())
    }
    pub fn io(e: impl Display) -> Self {
        Self::Io(e.to_string())
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

fn run(cli: Cli) -> Result<Status, Failure> {
    use commands as c;
    match cli.command {
        Command::Partitions { n, out } => c::partitions(n, out.format, out.out.as_deref()),
        Command::Hasse { n, order, out } => {
            let order = match order {
                Order::Refinement => fdepth::OrderKind::Refinement,
                Order::Dominance => fdepth::OrderKind::Dominance,
            };
            c::hasse(n, order, out.format, out.out.as_deref())
        }
        Command::GenfunTable { n, f, out } => c::genfun_table(n, &c::genfun(&f.spec, f.unchecked)?, out.format, out.out.as_deref()),
        Command::Bounds { n, f, out } => c::bounds(n, &c::genfun(&f.spec, f.unchecked)?, out.format, out.out.as_deref()),
        Command::Usefulness { n, f, out } => c::usefulness(n, &c::genfun(&f.spec, f.unchecked)?, out.format, out.out.as_deref()),
        Command::Classify { input, f, out } => c::classify(&input, &c::genfun(&f.spec, f.unchecked)?, out.format, out.out.as_deref()),
        Command::Witness { input, f, out } => c::witness(&input, &c::genfun(&f.spec, f.unchecked)?, out.format, out.out.as_deref()),
        Command::Verify { suite, n_max, seed, extra, unchecked, out } => {
            let extra = extra.iter().map(|s| c::genfun(s, unchecked)).collect::<Result<Vec<_>, _>>()?;
            c::verify(&suite, n_max, seed, extra, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
