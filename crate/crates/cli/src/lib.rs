//! The `betamix` command-line tool.
//!
//! Every subcommand is a plain function over parsed arguments so tests can
//! drive them without spawning a process. Results go to files or standard
//! output; diagnostics go to standard error through `log`, filtered by the
//! `BETAMIX_LOG` environment variable.

pub mod bench;
pub mod commands;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use betamix::data::Dataset;

pub const DEFAULT_SEED: u64 = 42;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "betamix", version, about = "Flexible bivariate beta mixture clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one of the synthetic benchmark data sets as labeled CSV.
    Generate(GenerateArgs),
    /// Fit a mixture to a CSV file and write the model document.
    Fit(FitArgs),
    /// Assign each row of a CSV file to a cluster of a fitted model.
    Predict(PredictArgs),
    /// Draw labeled points from a fitted model.
    Sample(SampleArgs),
    /// Compare two labelings: clustering accuracy, ARI and AMI.
    Eval(EvalArgs),
    /// Run k-means, GMM and FBBMM on every synthetic data set.
    Bench(BenchArgs),
    /// Scatter plot of a two-column CSV file as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// circles, varied, aniso-neg, aniso-pos or blobs
    #[arg(long)]
    pub dataset: Dataset,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Model document to write; the likelihood trace goes next to it.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub clusters: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    /// Reduce the input to two principal components first.
    #[arg(long)]
    pub pca: bool,
    /// The last input column holds labels (ignored for fitting).
    #[arg(long)]
    pub labels: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub pca: bool,
    #[arg(long)]
    pub labels: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// CSV whose last column holds the reference labels.
    #[arg(long)]
    pub truth: PathBuf,
    /// CSV whose last column holds the predicted labels.
    #[arg(long)]
    pub predicted: PathBuf,
    /// Also write the scores as CSV (plus a run manifest).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Color points by the last column.
    #[arg(long)]
    pub labels: bool,
    #[arg(long)]
    pub output: PathBuf,
}

/// A command that did not complete normally.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<betamix::Error> for Failure {
    fn from(e: betamix::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

pub fn execute(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Fit(a) => commands::fit(a),
        Command::Predict(a) => commands::predict(a),
        Command::Sample(a) => commands::sample(a),
        Command::Eval(a) => commands::eval(a),
        Command::Bench(a) => bench::run(a),
        Command::Plot(a) => commands::plot(a),
    }
}

/// Parse `args` and run; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}
