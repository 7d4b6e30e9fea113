//! `alloc-design`: allocation criteria, exact power and reference tables and
//! figures from the command line.
//!
//! Exit codes: 0 on success, 2 on usage or parameter errors, 3 on numerical
//! failure (including an unreachable target in `minimal-n`).
//! `ALLOC_DESIGN_THREADS` caps the parallelism of grid sweeps; output is
//! byte-identical regardless of thread count.

// degenerate-range checks use `!(a < b)` so that NaN takes the fallback
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod out;
mod run;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "alloc-design", version, about = "Two-arm trial allocation design toolkit")]
pub struct Cli {
    /// Decimal places used in text and CSV output
    #[arg(long, global = true, default_value_t = 7)]
    pub precision: usize,
    /// Write the main output to a file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    /// Standard-deviation-proportional allocation
    Neyman,
    /// Numeric minimizer of the error-decay rate
    Bahadur,
    /// Closed-form rate minimizer (binary responses only)
    BahadurClosed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum SidedArg {
    One,
    #[default]
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GammaParamArg {
    Scale,
    Rate,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute an allocation fraction under a chosen criterion
    Allocate {
        #[arg(long = "pA")]
        p_a: Option<f64>,
        #[arg(long = "pB")]
        p_b: Option<f64>,
        /// Response model of arm A, e.g. `poisson:lambda=2`
        #[arg(long = "model-a")]
        model_a: Option<String>,
        /// Response model of arm B, e.g. `poisson:lambda=3`
        #[arg(long = "model-b")]
        model_b: Option<String>,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        /// Tolerance of the numeric minimizer
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Exact power of a Wald test for one design
    Power {
        #[arg(long = "pA")]
        p_a: f64,
        #[arg(long = "pB")]
        p_b: f64,
        #[arg(long)]
        n: u64,
        #[arg(long = "NA")]
        n_a: u64,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, value_enum, default_value_t)]
        sided: SidedArg,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive scan for the power-maximizing group size
    OptimalNu {
        #[arg(long = "pA")]
        p_a: f64,
        #[arg(long = "pB")]
        p_b: f64,
        #[arg(long)]
        n: u64,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, value_enum, default_value_t)]
        sided: SidedArg,
        /// Write the full power curve as CSV to this path
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Exact probability of declaring the lower dose the target
    Mtd {
        #[arg(long = "pA")]
        p_a: f64,
        #[arg(long = "pB")]
        p_b: f64,
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        n: u64,
        #[arg(long = "NA")]
        n_a: u64,
        #[arg(long)]
        json: bool,
    },
    /// Smallest n reaching a target one-sided power
    MinimalN {
        #[arg(long = "pA")]
        p_a: f64,
        #[arg(long = "pB")]
        p_b: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// One of: balanced, neyman, bahadur, fixed:NU
        #[arg(long)]
        rule: String,
        #[arg(long = "n-max", default_value_t = 10_000)]
        n_max: u64,
        /// Require the target power for this many consecutive n
        #[arg(long = "stable-window", default_value_t = 1)]
        stable_window: u64,
        #[arg(long)]
        json: bool,
    },
    /// Emit a reference table as CSV
    Table {
        /// 1: binomial allocations, 2: dose finding, 3: general responses
        #[arg(long)]
        which: u8,
        /// Restrict the Gamma rows of table 3 to one parameter reading
        #[arg(long = "gamma-param", value_enum)]
        gamma_param: Option<GammaParamArg>,
    },
    /// Emit a reference figure as CSV (optionally with an SVG chart)
    Figure {
        /// 1a (n=200 sweep), 1b (n=500 sweep) or 3 (power curve)
        #[arg(long)]
        which: String,
        /// Grid step of the sweep figures: 0.01, 0.025 or 0.05
        #[arg(long = "grid-step", default_value_t = 0.01)]
        grid_step: f64,
        /// Write an SVG chart to this path
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the misselection probability
    Simulate {
        #[arg(long = "model-a")]
        model_a: String,
        #[arg(long = "model-b")]
        model_b: String,
        #[arg(long)]
        n: u64,
        #[arg(long = "NA")]
        n_a: u64,
        #[arg(long)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// CLI failure classified by exit code.
pub enum CliError {
    /// Bad flags or parameter domains: exit 2.
    Usage(String),
    /// Optimizer or solver failure, unreachable targets: exit 3.
    Numerical(String),
}

impl From<alloc_design_core::Error> for CliError {
    fn from(e: alloc_design_core::Error) -> Self {
        match e {
            alloc_design_core::Error::Domain(m) => CliError::Usage(m),
            alloc_design_core::Error::Optimizer(m) | alloc_design_core::Error::Singular(m) => {
                CliError::Numerical(m)
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("ALLOC_DESIGN_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    match run::dispatch(&cli) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}
