//! Fixed-seed runs of the three worked distributions: the spiky spectrum,
//! i.i.d. Bernoulli coordinates, and the symmetric Gaussian mixture.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dist::{self, DistributionSpec};
use crate::error::Result;
use crate::learner::{empirical_sample_complexity, learning_curve, LearnerKind, LearningCurve};
use crate::seeding::derive_seed;
use crate::spectral::k_gamma;

pub const DEFAULT_SEED: u64 = 20_100_601;
pub const DEFAULT_TRIALS: usize = 40;
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(600);

/// Target excess error for the sample-complexity readouts.
pub const EPSILON: f64 = 0.15;
/// Error level the mixture learners are compared at.
pub const MIXTURE_TARGET_ERROR: f64 = 0.05;

pub const SPIKY_DIM: usize = 1001;
pub const BERNOULLI_DIMS: [usize; 2] = [20, 40];
pub const MIXTURE_DIM: usize = 256;
pub const MIXTURE_OFFSETS: [f64; 2] = [4.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub trials: usize,
    pub workers: Option<usize>,
    pub budget: Duration,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            workers: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRun {
    pub name: String,
    pub d: usize,
    pub gamma: f64,
    pub k_gamma: usize,
    /// Closed form for this family.
    pub k_gamma_expected: usize,
    pub epsilon: f64,
    pub sample_complexity: Option<usize>,
    pub curve: LearningCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureRun {
    pub name: String,
    pub v: f64,
    pub d: usize,
    pub gamma: f64,
    pub k_gamma: usize,
    pub k_gamma_expected: usize,
    pub target_error: f64,
    /// Smallest grid `m` with mean test error at most the target.
    pub generative_reach: Option<usize>,
    pub discriminative_reach: Option<usize>,
    pub generative: LearningCurve,
    pub discriminative: LearningCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub seed: u64,
    pub trials: usize,
    pub complete: bool,
    pub elapsed_seconds: f64,
    pub spiky: Option<ComplexityRun>,
    pub bernoulli: Vec<ComplexityRun>,
    /// Sample complexity at d = 40 over that at d = 20.
    pub bernoulli_complexity_ratio: Option<f64>,
    pub mixture: Vec<MixtureRun>,
}

pub fn spiky_grid() -> Vec<usize> {
    vec![1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 40]
}

pub fn bernoulli_grid() -> Vec<usize> {
    (1..=32).map(|i| 2 * i).collect()
}

pub fn mixture_grid() -> Vec<usize> {
    vec![2, 4, 6, 8, 12, 16, 24, 32, 48, 64]
}

fn complexity_run(
    name: String,
    spec: &DistributionSpec,
    k_gamma_expected: usize,
    grid: &[usize],
    seed: u64,
    opts: &ReproduceOptions,
) -> Result<ComplexityRun> {
    let gamma = 1.0;
    let curve = learning_curve(
        spec,
        gamma,
        grid,
        opts.trials,
        LearnerKind::ErmHeuristic,
        seed,
        opts.workers,
    )?;
    Ok(ComplexityRun {
        name,
        d: spec.dim(),
        gamma,
        k_gamma: k_gamma(&spec.spectrum(), gamma)?.k,
        k_gamma_expected,
        epsilon: EPSILON,
        sample_complexity: empirical_sample_complexity(&curve, EPSILON)?,
        curve,
    })
}

/// `spiky(1001)` at `γ = 1`: `k_1 = 1` although `E‖X‖² = 1001`.
pub fn spiky_example(opts: &ReproduceOptions) -> Result<ComplexityRun> {
    let spec = dist::spiky(SPIKY_DIM)?;
    complexity_run(
        "spiky".into(),
        &spec,
        1,
        &spiky_grid(),
        derive_seed(opts.seed, &[0]),
        opts,
    )
}

/// Bernoulli coordinates at `γ = 1`: `k_1 = ⌈d/2⌉`.
pub fn bernoulli_example(d: usize, opts: &ReproduceOptions) -> Result<ComplexityRun> {
    let spec = dist::bernoulli(d)?;
    complexity_run(
        format!("bernoulli_d{d}"),
        &spec,
        d.div_ceil(2),
        &bernoulli_grid(),
        derive_seed(opts.seed, &[1, d as u64]),
        opts,
    )
}

/// Mixture with offset `v` at `γ = v/2`: `k_γ = ⌈d/(1 + v²/4)⌉`; compares
/// the nearest-mean rule with margin-error minimization.
pub fn mixture_example(v: f64, opts: &ReproduceOptions) -> Result<MixtureRun> {
    let spec = dist::gaussian_mixture(MIXTURE_DIM, v)?;
    let gamma = v / 2.0;
    let grid = mixture_grid();
    let seed = derive_seed(opts.seed, &[2, v.to_bits()]);
    let generative = learning_curve(
        &spec,
        gamma,
        &grid,
        opts.trials,
        LearnerKind::Generative,
        seed,
        opts.workers,
    )?;
    let discriminative = learning_curve(
        &spec,
        gamma,
        &grid,
        opts.trials,
        LearnerKind::ErmHeuristic,
        seed,
        opts.workers,
    )?;
    let reach = |c: &LearningCurve| {
        c.entries
            .iter()
            .find(|e| e.mean_test_error <= MIXTURE_TARGET_ERROR)
            .map(|e| e.m)
    };
    Ok(MixtureRun {
        name: format!("mixture_v{v}"),
        v,
        d: MIXTURE_DIM,
        gamma,
        k_gamma: k_gamma(&spec.spectrum(), gamma)?.k,
        k_gamma_expected: (MIXTURE_DIM as f64 / (1.0 + v * v / 4.0)).ceil() as usize,
        target_error: MIXTURE_TARGET_ERROR,
        generative_reach: reach(&generative),
        discriminative_reach: reach(&discriminative),
        generative,
        discriminative,
    })
}

/// Runs every example in order, stopping early (with `complete = false`)
/// once the time budget is spent.
pub fn reproduce_examples(opts: &ReproduceOptions) -> Result<ReproduceReport> {
    let start = Instant::now();
    let mut report = ReproduceReport {
        seed: opts.seed,
        trials: opts.trials,
        complete: false,
        elapsed_seconds: 0.0,
        spiky: None,
        bernoulli: Vec::new(),
        bernoulli_complexity_ratio: None,
        mixture: Vec::new(),
    };
    let over_budget = |r: &mut ReproduceReport| {
        r.elapsed_seconds = start.elapsed().as_secs_f64();
        start.elapsed() > opts.budget
    };

    report.spiky = Some(spiky_example(opts)?);
    for d in BERNOULLI_DIMS {
        if over_budget(&mut report) {
            return Ok(report);
        }
        report.bernoulli.push(bernoulli_example(d, opts)?);
    }
    if let [small, large] = report.bernoulli.as_slice() {
        if let (Some(a), Some(b)) = (small.sample_complexity, large.sample_complexity) {
            report.bernoulli_complexity_ratio = Some(b as f64 / a as f64);
        }
    }
    for v in MIXTURE_OFFSETS {
        if over_budget(&mut report) {
            return Ok(report);
        }
        report.mixture.push(mixture_example(v, opts)?);
    }
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    report.complete = true;
    Ok(report)
}

/// One row per example: `example,d,gamma,k_gamma,k_gamma_expected,quantity,value`.
pub fn write_table_csv<W: Write>(writer: W, report: &ReproduceReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "example",
        "d",
        "gamma",
        "k_gamma",
        "k_gamma_expected",
        "quantity",
        "value",
    ])?;
    let opt = |v: Option<usize>| v.map_or_else(|| "not_reached".to_string(), |m| m.to_string());
    for run in report.spiky.iter().chain(&report.bernoulli) {
        w.write_record([
            run.name.clone(),
            run.d.to_string(),
            run.gamma.to_string(),
            run.k_gamma.to_string(),
            run.k_gamma_expected.to_string(),
            format!("sample_complexity_eps_{}", run.epsilon),
            opt(run.sample_complexity),
        ])?;
    }
    if let Some(r) = report.bernoulli_complexity_ratio {
        w.write_record([
            "bernoulli",
            "",
            "1",
            "",
            "",
            "complexity_ratio_d40_d20",
            &r.to_string(),
        ])?;
    }
    for run in &report.mixture {
        for (quantity, value) in [
            ("generative_reach_error_0.05", run.generative_reach),
            ("discriminative_reach_error_0.05", run.discriminative_reach),
        ] {
            w.write_record([
                run.name.clone(),
                run.d.to_string(),
                run.gamma.to_string(),
                run.k_gamma.to_string(),
                run.k_gamma_expected.to_string(),
                quantity.to_string(),
                opt(value),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
