//! Command-line front end: JSON instances in, machine-readable reports out.
//!
//! Exit codes: 0 every check passed; 1 a non-certified check failed; 2 parse,
//! schema, or usage error; 3 precondition violation; 4 a certified bound was
//! violated (a library bug on valid inputs, never the instance's fault).

pub mod commands;
pub mod error;
pub mod instance;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "interlace",
    version,
    about = "Certified partitions, pavings, and expected characteristic polynomials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args)]
pub struct Common {
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the command's headline tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Expected characteristic polynomial of a sum of independent rank-1s.
    MixedCharpoly {
        /// Instance file (kind = covariances or random_vectors).
        #[arg(long)]
        input: PathBuf,
        /// Dump the coefficients (ascending degree, one per line).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Split an identity-decomposing vector system into r parts.
    Partition {
        /// Instance file (kind = vectors).
        #[arg(long)]
        input: PathBuf,
        /// Number of parts.
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Two-way split of a unit-norm system summing to eta times the identity.
    Weaver {
        /// Instance file (kind = vectors).
        #[arg(long)]
        input: PathBuf,
        /// Identity multiple of the frame operator.
        #[arg(long)]
        eta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Coordinate paving of a zero-diagonal Hermitian matrix.
    Pave {
        /// Instance file (kind = matrix).
        #[arg(long)]
        input: PathBuf,
        /// Target ratio for the diagonal-block compressions.
        #[arg(long)]
        eps: f64,
        /// Parts per side (default: ceil(36/eps²)).
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay the root-bound induction on a decomposition of the identity.
    BarrierTrace {
        /// Instance file (kind = covariances).
        #[arg(long)]
        input: PathBuf,
        /// Trace ceiling for each covariance.
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in invariant suite.
    Verify {
        /// One of: identities, tree, oracle, stability.
        #[arg(long)]
        suite: String,
        /// Optional instance for the tree suite (kind = random_vectors).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parse arguments, run, print the report, and hand back the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            report::exit_code(&report)
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
