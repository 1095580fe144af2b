//! `fairdiv` command line: solve, check, mms-value, gen and fixtures.
//!
//! Exit status: 0 pass, 1 check failed, 2 bad input, 3 method or class
//! mismatch, 4 internal invariant failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairdiv::{BigInt, ClassTag, Kind};

#[derive(Parser, Debug)]
#[command(name = "fairdiv", version, about = "Fair allocation of indivisible goods and chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute an allocation and print it with its certificates.
    Solve(SolveArgs),
    /// Test one property of a given allocation.
    Check(CheckArgs),
    /// Maximin share of one agent, with a partition achieving it.
    MmsValue(MmsValueArgs),
    /// Print a random instance of a utility class.
    Gen(GenArgs),
    /// Run the built-in worked examples.
    Fixtures,
}

#[derive(Args, Debug)]
struct Input {
    /// Instance document, `-` for standard input.
    instance: PathBuf,
    /// Use arbitrary-precision integers instead of 64-bit ones.
    #[arg(long)]
    big: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// EF1 + PO for bivalued chores.
    Ef1po,
    /// MMS for weakly lexicographic or factored personalized bivalued utilities.
    Mms,
    /// MMS + PO for weakly lexicographic or factored bivalued utilities.
    Mmspo,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    method: Method,
    /// Write the market event log here, one JSON object per line (ef1po only).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CheckProperty {
    Ef1,
    Ef,
    Mms,
    Po,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    property: CheckProperty,
    /// Allocation document with a `bundles` object.
    #[arg(long)]
    allocation: PathBuf,
    /// Decide MMS and PO by exhaustive search.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct MmsValueArgs {
    #[command(flatten)]
    input: Input,
    /// Agent name, or 0-based index.
    #[arg(long)]
    agent: String,
    /// Number of bundles; defaults to the number of agents.
    #[arg(long)]
    bundles: Option<usize>,
    /// Use exhaustive search instead of the greedy partition.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    class: ClassTag,
    #[arg(long)]
    kind: Kind,
    #[arg(short = 'n', long = "agents")]
    n: usize,
    #[arg(short = 'm', long = "items")]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed ratio between the two values of bivalued classes.
    #[arg(long)]
    p: Option<i64>,
    /// Tier count (weakly lexicographic) or chain length (factored).
    #[arg(long)]
    tiers: Option<usize>,
    /// Largest value of general additive instances.
    #[arg(long)]
    max_value: Option<i64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) if args.input.big => commands::solve::<BigInt>(&args),
        Command::Solve(args) => commands::solve::<i64>(&args),
        Command::Check(args) if args.input.big => commands::check::<BigInt>(&args),
        Command::Check(args) => commands::check::<i64>(&args),
        Command::MmsValue(args) if args.input.big => commands::mms_value::<BigInt>(&args),
        Command::MmsValue(args) => commands::mms_value::<i64>(&args),
        Command::Gen(args) => commands::gen(&args),
        Command::Fixtures => commands::fixtures(),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
