//! Command line front end: reproduces the library's information sweeps,
//! bound families, densities, costs, entanglement curves and probe
//! optimization runs as CSV or JSON artifacts.
//!
//! Output is deterministic for a fixed invocation (including `--seed`), all
//! floats carry full round-trip precision, and progress chatter goes to
//! stderr only. Exit codes: 0 success, 2 invalid configuration, 3 evaluation
//! budget exhausted.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "multiphase",
    version,
    about = "global multiphase estimation sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeFamily {
    /// Equatorial product state (parallel-separable strategy).
    Product,
    /// Uniform superposition (sequential strategy).
    Hb,
    /// Both families, one row each.
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostKind {
    /// 4 sin^2(pi gamma), the sine cost of the optimal-POVM class.
    HolevoSine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostModeArg {
    Continuous,
    Discrete,
    Both,
}

/// Inclusive integer range `A..B`.
#[derive(Clone, Copy)]
pub struct Range {
    pub lo: u32,
    pub hi: u32,
}

impl std::str::FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad lower bound: {e}"))?;
        let hi = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad upper bound: {e}"))?;
        Ok(Range { lo, hi })
    }
}

impl Range {
    pub fn iter(&self, step: u32) -> impl Iterator<Item = u32> {
        let (lo, hi) = (self.lo, self.hi);
        (lo..=hi).step_by(step.max(1) as usize)
    }
}

#[derive(Args)]
pub struct OutputArgs {
    /// Output path; "-" writes to stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sweep the mutual information over N for one or both probe families.
    ScanMi {
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Inclusive N range, e.g. 1..30.
        #[arg(long, value_name = "A..B")]
        n_range: Range,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[arg(long, value_enum, default_value_t = ProbeFamily::Both)]
        probe: ProbeFamily,
        /// Absolute quadrature tolerance in bits.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Integrand evaluation budget (per point).
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep the multiphase information bounds over one of three families.
    Bounds {
        /// Fixed-k sweep over an N range.
        #[arg(long, conflicts_with_all = ["diagonal", "k_range"])]
        k: Option<u64>,
        /// Sweep along the diagonal k = N.
        #[arg(long, conflicts_with = "k_range")]
        diagonal: bool,
        /// Fixed-N sweep over a k range (requires --n).
        #[arg(long, value_name = "A..B")]
        k_range: Option<Range>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_name = "A..B")]
        n_range: Option<Range>,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Locate the smallest N where the uniform probe stably beats the
    /// product probe.
    Crossover {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        /// Margin in bits that declares a win (guards quadrature noise).
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Geometric measure of entanglement of the uniform probe vs its
    /// asymptote.
    Entanglement {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_name = "A..B")]
        n_range: Range,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Multi-start search for the information-optimal probe (JSON report).
    Optimize {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 4)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the conditional density of a probe on a uniform grid.
    Density {
        #[arg(long, value_enum, default_value_t = ProbeFamily::Hb)]
        probe: ProbeFamily,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        n: u32,
        /// Grid points (per axis for k = 2).
        #[arg(long, default_value_t = 512)]
        points: usize,
        /// Constant offset added to every grid angle (turns unless --radians).
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        /// Interpret --offset in radians instead of turns.
        #[arg(long)]
        radians: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bayesian sine-cost of a probe, continuous and/or discretized.
    Cost {
        #[arg(long, value_enum, default_value_t = ProbeFamily::Hb)]
        probe: ProbeFamily,
        #[arg(long, value_name = "A..B")]
        n_range: Range,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[arg(long, value_enum, default_value_t = CostKind::HolevoSine)]
        cost: CostKind,
        #[arg(long, value_enum, default_value_t = CostModeArg::Both)]
        mode: CostModeArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
