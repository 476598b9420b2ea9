//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use troptree::cli::{self, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Dot => OutputFormat::Dot,
        }
    }
}

/// Tropical line segments and tree topologies for equidistant trees.
#[derive(Parser)]
#[command(name = "troptree", version, about)]
struct Args {
    /// Numeric tolerance for torus comparisons and topology extraction.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Rescale every bending point to diameter 2 (height-1 trees).
    #[arg(long, global = true)]
    normalize: bool,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether an input (Newick or vector JSON) is an ultrametric.
    Validate { input: PathBuf },
    /// Tropical line segment from one input to another.
    Segment {
        from: PathBuf,
        to: PathBuf,
        /// Re-check every bending point against the three-point condition.
        #[arg(long)]
        verify: bool,
    },
    /// Clade family of a tree or vector input.
    Topologies { input: PathBuf },
    /// Compatibility set of two topology files, or a single membership
    /// decision when a candidate topology file is given.
    Compatible {
        f1: PathBuf,
        f2: PathBuf,
        candidate: Option<PathBuf>,
        /// Only evaluate the necessary condition (any leaf count).
        #[arg(long)]
        necessary_only: bool,
        /// Include non-full-dimensional candidates in set enumeration.
        #[arg(long)]
        all: bool,
    },
    /// Tropical distance between two inputs.
    Distance { a: PathBuf, b: PathBuf },
    /// Relabel an input's leaves by a permutation, e.g. --sigma 2,3,1,4.
    Permute {
        input: PathBuf,
        #[arg(long)]
        sigma: String,
    },
    /// Sample a seeded random coalescent tree.
    Random { leaves: usize },
    /// Enumerate topologies on N leaves (full-dimensional by default).
    Enumerate {
        leaves: usize,
        /// Include non-full-dimensional families.
        #[arg(long)]
        all: bool,
    },
    /// Replay the worked numeric examples and print a pass/fail table.
    Repro,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig {
        tolerance: args.tol,
        normalize: args.normalize,
        format: args.format.into(),
        seed: args.seed,
    };
    let cfg = match cfg.validated() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("troptree: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &args.command {
        Command::Validate { input } => cli::cmd_validate(input, &cfg),
        Command::Segment { from, to, verify } => cli::cmd_segment(from, to, &cfg, *verify),
        Command::Topologies { input } => cli::cmd_topologies(input, &cfg),
        Command::Compatible {
            f1,
            f2,
            candidate,
            necessary_only,
            all,
        } => cli::cmd_compatible(f1, f2, candidate.as_deref(), &cfg, *necessary_only, *all),
        Command::Distance { a, b } => cli::cmd_distance(a, b, &cfg),
        Command::Permute { input, sigma } => cli::cmd_permute(input, sigma, &cfg),
        Command::Random { leaves } => cli::cmd_random(*leaves, &cfg),
        Command::Enumerate { leaves, all } => cli::cmd_enumerate(*leaves, *all, &cfg),
        Command::Repro => cli::cmd_repro(),
    };
    match result {
        Ok(out) => {
            println!("{}", out.text);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("troptree: {e}");
            ExitCode::from(2)
        }
    }
}
