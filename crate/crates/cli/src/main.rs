//! `polyode`: check theorem hypotheses, integrate, and search for closed
//! solutions of equations given as JSON spec files.
//!
//! Exit codes: 0 satisfied / found, 1 violated, 2 inconclusive / escaped /
//! nothing found, 3 input error.

mod commands;
mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "polyode",
    version,
    about = "Comparison and closed-solution tools for y' + Σ a_k(t) y^k = 0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the hypotheses of one theorem and write a JSON report.
    Check(CheckArgs),
    /// Integrate from `y(t0) = y0` to the horizon and write a `t,y` CSV.
    Integrate(IntegrateArgs),
    /// Find closed solutions `y(t0) = y(T)` in a bracket or by scanning a range.
    Closed(ClosedArgs),
    /// Run the bundled example corpus against its recorded expectations.
    VerifyExamples(VerifyArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Equation spec (JSON).
    #[arg(long, short)]
    input: PathBuf,
    /// Theorem id such as T4.1, C3.2 or T5.5.
    #[arg(long, short)]
    theorem: String,
    /// Report destination; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    settings: SettingsArgs,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Debug, Clone, Default)]
struct SettingsArgs {
    /// Pass threshold for condition margins.
    #[arg(long)]
    tol: Option<f64>,
    /// Sample points per condition.
    #[arg(long)]
    grid: Option<usize>,
    /// Threshold for strict inequalities.
    #[arg(long)]
    strict_eps: Option<f64>,
}

/// Parameter values overriding those in the spec file.
#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c_plus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c_minus: Option<f64>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    t_split: Option<f64>,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Initial value at t0.
    #[arg(long, allow_negative_numbers = true)]
    y0: f64,
    /// Local error tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Resample the dense output on this many uniform points instead of the step knots.
    #[arg(long)]
    samples: Option<usize>,
    /// CSV destination; stdout when omitted (the summary then goes to stderr).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClosedArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Search for a fixed point of the end map in [LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, conflicts_with_all = ["scan", "bracket_from"])]
    bracket: Option<Vec<f64>>,
    /// Probe [LO, HI] and solve on every sign change.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, conflicts_with = "bracket_from")]
    scan: Option<Vec<f64>>,
    /// Use the closed-solution bracket concluded by this theorem.
    #[arg(long)]
    bracket_from: Option<String>,
    /// Number of probes for --scan.
    #[arg(long, default_value_t = 64)]
    probes: usize,
    /// Fixed-point residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Search the reflected equation and map the result back (nonpositive solutions).
    #[arg(long)]
    reflected: bool,
    /// Include trajectory samples in the report.
    #[arg(long)]
    embed_trajectory: bool,
    /// Report destination; stdout when omitted. Trajectories go to a sidecar CSV next to it.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Print the fixture inventory without running anything.
    #[arg(long)]
    list: bool,
    /// Directory holding manifest.json and the fixture specs.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(a) => commands::check(&a),
        Command::Integrate(a) => commands::integrate(&a),
        Command::Closed(a) => commands::closed(&a),
        Command::VerifyExamples(a) => corpus::run(&a),
    };
    ExitCode::from(code)
}
