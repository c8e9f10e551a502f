//! `margin-cx`: batch front end for the margin sample-complexity analyses.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use commands::{prepare, CliError, CommandName, Overrides};

#[derive(Parser)]
#[command(
    name = "margin-cx",
    version,
    about = "Margin sample-complexity experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON experiment config.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo loops; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Adapted dimension of a covariance spectrum.
    Kgamma(CommonArgs),
    /// (b, k)-limitedness certificate for a point set.
    LimitCert(CommonArgs),
    /// Exact shattering check at the origin.
    ShatterCheck(CommonArgs),
    /// Fat-shattering dimension bracket for a point set.
    FatDim(CommonArgs),
    /// Monte Carlo estimate of P[λ_m ≥ mγ²] over a grid of m.
    EigenProb(CommonArgs),
    /// Half the first m at which the shattering probability drops below 1/2.
    MUnderline(CommonArgs),
    /// Smallest Gram eigenvalue against its asymptotic edge.
    EdgeCheck(CommonArgs),
    /// Learning curve for one learner.
    LearnCurve(CommonArgs),
    /// Learning curve plus its empirical sample complexity.
    SampleComplexity(CommonArgs),
    /// Fixed-seed run of the spiky, Bernoulli and mixture examples.
    ReproduceExamples(CommonArgs),
}

impl Command {
    fn split(self) -> (CommandName, CommonArgs) {
        match self {
            Command::Kgamma(a) => (CommandName::Kgamma, a),
            Command::LimitCert(a) => (CommandName::LimitCert, a),
            Command::ShatterCheck(a) => (CommandName::ShatterCheck, a),
            Command::FatDim(a) => (CommandName::FatDim, a),
            Command::EigenProb(a) => (CommandName::EigenProb, a),
            Command::MUnderline(a) => (CommandName::MUnderline, a),
            Command::EdgeCheck(a) => (CommandName::EdgeCheck, a),
            Command::LearnCurve(a) => (CommandName::LearnCurve, a),
            Command::SampleComplexity(a) => (CommandName::SampleComplexity, a),
            Command::ReproduceExamples(a) => (CommandName::ReproduceExamples, a),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    tool_version: &'static str,
    command: &'static str,
    seed: u64,
    inputs_digest: String,
    config: &'a Value,
    outputs: Vec<String>,
    summary: Value,
    wall_clock_seconds: f64,
    complete: bool,
}

/// SHA-256 of the effective config, leaving out fields that cannot change
/// the results.
fn inputs_digest(effective: &Value) -> String {
    let mut v = effective.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("workers");
        obj.remove("out");
    }
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(
        || p.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn run(cmd: CommandName, args: CommonArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let ov = Overrides {
        config: args.config,
        seed: args.seed,
        workers: args.workers,
        out: args.out,
    };
    let prepared = prepare(cmd, &ov)?;
    let out = prepared.out.clone();
    fs::create_dir_all(&out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    let outcome = (prepared.job)(&out)?;
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: cmd.as_str(),
        seed: prepared.seed,
        inputs_digest: inputs_digest(&prepared.effective),
        config: &prepared.effective,
        outputs: outcome.outputs.iter().map(|p| file_name(p)).collect(),
        summary: outcome.summary,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        complete: outcome.complete,
    };
    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&path, text + "\n")
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    println!(
        "{}",
        serde_json::to_string(&report.summary).expect("summary serializes")
    );
    Ok(())
}

fn main() -> ExitCode {
    let (cmd, args) = Cli::parse().command.split();
    match run(cmd, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("margin-cx {}: config error: {msg}", cmd.as_str());
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("margin-cx {}: {msg}", cmd.as_str());
            ExitCode::from(3)
        }
    }
}
