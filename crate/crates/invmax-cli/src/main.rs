//! Command-line driver: simulation, fitting, quantile curves, theoretical
//! norming/limit curves, invariant verification and the replication study.
//!
//! Exit codes: 0 success, 1 verification suites failed, 2 usage/domain
//! error, 3 data error, 4 numeric failure.

mod commands;
mod csvio;
mod manifest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "invmax", version, about = "Inverted max-stable distributions and their conditioned extremes")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a seeded sample from an inverted max-stable law (CSV x,y)
    Simulate(SimulateArgs),
    /// Fit a conditional tail model to threshold exceedances
    Fit(FitArgs),
    /// Emit fitted and theoretical conditional quantile curves
    Quantiles(QuantilesArgs),
    /// Emit theoretical norming-function or limit-law curves
    Theory(TheoryArgs),
    /// Run the numerical invariant suites and emit a pass/fail report
    Verify(VerifyArgs),
    /// Reproduce the replicated conditional-quantile comparison study
    Fig2(Fig2Args),
}

/// Family selection shared by several commands. Parameters accept plain
/// numbers; `theory` additionally accepts one sweep `lo..hi[:count]`.
#[derive(Args, Clone)]
pub struct FamilyArgs {
    /// family id: smith, schlather, extremalt, mixedlogistic,
    /// asymmetriclogistic, asymmetricmixed, marshallolkin, logistic,
    /// gammavarying
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Canonical,
    Smith,
    Gamma,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum WhatArg {
    Norming,
    Limit,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// sample size
    #[arg(long)]
    pub n: usize,
    /// RNG seed (mandatory: runs must be reproducible)
    #[arg(long)]
    pub seed: u64,
    /// stream index for replicate separation
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FitArgs {
    /// input CSV with header x,y
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.935)]
    pub threshold_quantile: f64,
    /// use the empirical x-quantile instead of -log(1-q)
    #[arg(long)]
    pub empirical_threshold: bool,
    /// output fit JSON
    #[arg(long)]
    pub out: PathBuf,
    /// optional residual CSV (x,z)
    #[arg(long)]
    pub residuals: Option<PathBuf>,
}

#[derive(Args)]
pub struct QuantilesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.935)]
    pub threshold_quantile: f64,
    #[arg(long)]
    pub empirical_threshold: bool,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// comma-separated probabilities
    #[arg(long, default_value = "0.025,0.5,0.975")]
    pub probs: String,
    /// top of the x grid (default: max observed x)
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub x_points: usize,
    /// fitted curves CSV (p,x,q); theory goes to `<out>`_theory.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum)]
    pub what: WhatArg,
    /// x grid start (default: the 0.87 exponential quantile)
    #[arg(long, default_value_t = 2.0402208285265546)]
    pub x_from: f64,
    /// x grid end (default: the 1 - 1e-13 exponential quantile)
    #[arg(long, default_value_t = 29.933606208922594)]
    pub x_to: f64,
    #[arg(long, default_value_t = 400)]
    pub x_points: usize,
    /// number of z points for limit-law curves
    #[arg(long, default_value_t = 512)]
    pub z_points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// all, moment, eta, endpoint-limit, convergence, variation
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// report JSON path (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct Fig2Args {
    /// Smith dependence parameter
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// threshold quantile on the exponential scale
    #[arg(long, default_value_t = 0.935)]
    pub threshold: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 7.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 40)]
    pub x_points: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn exit_code_for(e: &invmax::Error) -> ExitCode {
    match e {
        invmax::Error::Domain(_) => ExitCode::from(2),
        invmax::Error::Data(_) => ExitCode::from(3),
        _ => ExitCode::from(4),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Simulate(a) => commands::cmd_simulate(a).map(|()| ExitCode::SUCCESS),
        Command::Fit(a) => commands::cmd_fit(a).map(|()| ExitCode::SUCCESS),
        Command::Quantiles(a) => commands::cmd_quantiles(a).map(|()| ExitCode::SUCCESS),
        Command::Theory(a) => commands::cmd_theory(a).map(|()| ExitCode::SUCCESS),
        Command::Verify(a) => commands::cmd_verify(a)
            .map(|pass| if pass { ExitCode::SUCCESS } else { ExitCode::from(1) }),
        Command::Fig2(a) => commands::cmd_fig2(a).map(|()| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
