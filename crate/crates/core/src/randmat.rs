//! Monte Carlo estimates for the smallest eigenvalue of random Gram
//! matrices.
//!
//! Trial `t` always draws its points from the stream keyed by
//! `derive_seed(seed, [t])`, independent of `m`. Samples of different sizes
//! in the same trial are therefore nested, and by Cauchy interlacing
//! `λ_{m+1}(X_{m+1}X_{m+1}') ≤ λ_m(X_m X_m')` holds path by path.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dist::{sample_points, DistributionSpec, LabelModel};
use crate::error::{invalid, Error, Result};
use crate::linalg::smallest_gram_eigenvalue;
use crate::parallel::map_trials;
use crate::seeding::derive_seed;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub const DEFAULT_TRIALS: usize = 200;

/// Wilson score interval for `successes / trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenProbEstimate {
    pub m: usize,
    pub gamma: f64,
    /// Fraction of trials with `λ_m(XX') ≥ m γ²`.
    pub prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Seed of the point stream used by trial `t`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, &[t as u64])
}

/// `λ_m(X X')` for each trial's `m`-point sample.
pub fn smallest_eigenvalues(
    spec: &DistributionSpec,
    m: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<f64>> {
    if m == 0 || trials == 0 {
        return invalid("m and trials must be positive");
    }
    map_trials(trials, workers, |t| {
        let x = sample_points(spec, m, trial_seed(seed, t))?;
        Ok(smallest_gram_eigenvalue(x.matrix()))
    })
}

/// Probability that an `m`-point sample has `λ_m(XX') ≥ m γ²`.
pub fn estimate_shatter_prob(
    spec: &DistributionSpec,
    gamma: f64,
    m: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<EigenProbEstimate> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return invalid(format!("gamma must be positive, got {gamma}"));
    }
    let eig = smallest_eigenvalues(spec, m, trials, seed, workers)?;
    Ok(estimate_from(&eig, m, gamma, seed))
}

fn estimate_from(eig: &[f64], m: usize, gamma: f64, seed: u64) -> EigenProbEstimate {
    let threshold = m as f64 * gamma * gamma;
    let successes = eig.iter().filter(|&&l| l >= threshold).count();
    let trials = eig.len();
    let (ci_low, ci_high) = wilson_interval(successes, trials);
    EigenProbEstimate {
        m,
        gamma,
        prob: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        trials,
        seed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MUnderlineResult {
    pub m_underline: usize,
    /// Smallest scanned `m` with estimated probability below 1/2.
    pub first_failing_m: usize,
    pub grid: Vec<usize>,
    pub estimates: Vec<EigenProbEstimate>,
}

/// Half the smallest `m` at which `P[λ_m(XX') ≥ m γ²]` drops below 1/2,
/// found by a linear scan over `1..=m_max` that stops at the first failure.
pub fn m_underline(
    spec: &DistributionSpec,
    gamma: f64,
    m_max: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<MUnderlineResult> {
    if m_max == 0 {
        return invalid("m_max must be at least 1");
    }
    let mut grid = Vec::new();
    let mut estimates: Vec<EigenProbEstimate> = Vec::new();
    for m in 1..=m_max {
        let est = estimate_shatter_prob(spec, gamma, m, trials, seed, workers)?;
        let failing = est.prob < 0.5;
        grid.push(m);
        estimates.push(est);
        if failing {
            return Ok(MUnderlineResult {
                m_underline: m / 2,
                first_failing_m: m,
                grid,
                estimates,
            });
        }
    }
    let last = estimates.last().expect("m_max >= 1");
    Err(Error::NotFound {
        m_max,
        last_m: last.m,
        last_prob: last.prob,
    })
}

/// Limit `σ²(1 − √β)²` of `λ_m(XX'/d)` as `m/d → β`.
pub fn asymptotic_edge(sigma: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return invalid(format!("sigma must be positive, got {sigma}"));
    }
    let r = 1.0 - beta.sqrt();
    Ok(sigma * sigma * r * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub d: usize,
    pub m: usize,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Mean of `λ_m(XX')/d` over trials.
    pub empirical_mean: f64,
    pub predicted: f64,
    pub rel_error: f64,
}

/// Compares the Monte Carlo mean of `λ_m(XX')/d`, `m = round(β d)`, with the
/// asymptotic edge. `spec` must have i.i.d. coordinates; its law and variance
/// are re-instantiated in dimension `d`.
pub fn edge_mc_compare(
    spec: &DistributionSpec,
    beta: f64,
    d: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<EdgeReport> {
    let Some((law, variance)) = spec.iid_law() else {
        return invalid(
            "edge comparison needs i.i.d. coordinates (same law and variance, no rotation)",
        );
    };
    if d < 2 {
        return invalid("d must be at least 2");
    }
    let spec = &DistributionSpec::iid(law, d, variance, LabelModel::Coin { p: 0.5 })?;
    let predicted = asymptotic_edge(variance.sqrt(), beta)?;
    let m = (beta * d as f64).round() as usize;
    if m < 1 || m >= d {
        return invalid(format!("m = round(beta * d) = {m} must lie in [1, d)"));
    }
    let eig = smallest_eigenvalues(spec, m, trials, seed, workers)?;
    let empirical_mean = eig.iter().map(|l| l / d as f64).sum::<f64>() / trials as f64;
    Ok(EdgeReport {
        d,
        m,
        beta,
        trials,
        seed,
        empirical_mean,
        predicted,
        rel_error: (empirical_mean - predicted).abs() / predicted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalBeta {
    pub trace: f64,
    /// Largest `m` such that every `m' ≤ m` had `P[λ_{m'} ≥ m'] ≥ target`.
    pub m_max_ok: usize,
    pub beta_hat: f64,
    pub target: f64,
    pub estimates: Vec<EigenProbEstimate>,
}

/// Scans `m = 1, 2, …` until the estimated `P[λ_m(X_m X_m') ≥ m]` falls below
/// `target`, and reports the last passing `m` as a fraction of the trace.
/// This is an empirical quantity, not a constant from any theorem.
pub fn empirical_beta(
    spec: &DistributionSpec,
    target: f64,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<EmpiricalBeta> {
    let trace = spec.spectrum().trace();
    if trace <= 0.0 {
        return invalid("distribution has zero variance");
    }
    let mut estimates = Vec::new();
    let mut m_max_ok = 0;
    for m in 1..=spec.dim() {
        let est = estimate_shatter_prob(spec, 1.0, m, trials, seed, workers)?;
        let ok = est.prob >= target;
        estimates.push(est);
        if !ok {
            break;
        }
        m_max_ok = m;
    }
    Ok(EmpiricalBeta {
        trace,
        m_max_ok,
        beta_hat: m_max_ok as f64 / trace,
        target,
        estimates,
    })
}

/// Columns `m,gamma,prob,ci_low,ci_high,trials,seed`.
pub fn write_estimates_csv<W: Write>(writer: W, estimates: &[EigenProbEstimate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["m", "gamma", "prob", "ci_low", "ci_high", "trials", "seed"])?;
    for e in estimates {
        w.write_record([
            e.m.to_string(),
            e.gamma.to_string(),
            e.prob.to_string(),
            e.ci_low.to_string(),
            e.ci_high.to_string(),
            e.trials.to_string(),
            e.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `d,m,beta,trials,empirical_mean,predicted,rel_error,seed`.
pub fn write_edge_csv<W: Write>(writer: W, reports: &[EdgeReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "d",
        "m",
        "beta",
        "trials",
        "empirical_mean",
        "predicted",
        "rel_error",
        "seed",
    ])?;
    for r in reports {
        w.write_record([
            r.d.to_string(),
            r.m.to_string(),
            r.beta.to_string(),
            r.trials.to_string(),
            r.empirical_mean.to_string(),
            r.predicted.to_string(),
            r.rel_error.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
