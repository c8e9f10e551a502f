//! Per-command validation and execution. Validation runs before anything
//! touches the output directory; every check that can be made from the
//! config alone happens there.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Duration;

use margin_complexity::dist::DistributionSpec;
use margin_complexity::learner::{
    empirical_sample_complexity, learning_curve, write_curve_csv, LearnerKind, LearningCurve,
};
use margin_complexity::optim::{solve_min_norm_ineq, ConstraintSystem};
use margin_complexity::randmat::{self, edge_mc_compare, estimate_shatter_prob, m_underline};
use margin_complexity::reproduce::{self, reproduce_examples, ReproduceOptions};
use margin_complexity::seeding::derive_seed;
use margin_complexity::shatter::{
    fat_shattering_search, lambda_min_sufficient, sampled_shatter_screen, shatter_at_origin_with,
    ShatterOptions, DEFAULT_ENUMERATION_CAP,
};
use margin_complexity::spectral::{
    check_growth_bound, k_gamma, set_k_gamma, set_limit_certificate, set_limit_profile,
    CovarianceSpectrum,
};
use margin_complexity::SampleMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_SCREEN_SAMPLES: usize = 10_000;
pub const DEFAULT_EDGE_TRIALS: usize = 20;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing config; exit code 2.
    Config(String),
    /// Failure while running the analysis; exit code 3.
    Runtime(String),
}

impl From<margin_complexity::Error> for CliError {
    fn from(e: margin_complexity::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

/// What a finished command hands back for the report.
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
    pub complete: bool,
}

type Job = Box<dyn FnOnce(&Path) -> Result<Outcome, CliError>>;

/// A validated command, ready to run.
pub struct Prepared {
    /// Effective config with overrides and defaults applied.
    pub effective: Value,
    pub seed: u64,
    pub out: PathBuf,
    pub job: Job,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    Kgamma,
    LimitCert,
    ShatterCheck,
    FatDim,
    EigenProb,
    MUnderline,
    EdgeCheck,
    LearnCurve,
    SampleComplexity,
    ReproduceExamples,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Kgamma => "kgamma",
            CommandName::LimitCert => "limit-cert",
            CommandName::ShatterCheck => "shatter-check",
            CommandName::FatDim => "fat-dim",
            CommandName::EigenProb => "eigen-prob",
            CommandName::MUnderline => "m-underline",
            CommandName::EdgeCheck => "edge-check",
            CommandName::LearnCurve => "learn-curve",
            CommandName::SampleComplexity => "sample-complexity",
            CommandName::ReproduceExamples => "reproduce-examples",
        }
    }
}

/// Command-line values that override config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

struct Loaded<T> {
    cfg: T,
    base: PathBuf,
    seed: u64,
    out: PathBuf,
}

fn load<T>(ov: &Overrides, fallback: Option<T>, default_seed: u64) -> Result<Loaded<T>, CliError>
where
    T: serde::de::DeserializeOwned + CommonFields,
{
    let (mut cfg, base) = match (&ov.config, fallback) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg: T = parse(&text).map_err(CliError::Config)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (cfg, base)
        }
        (None, Some(cfg)) => (cfg, PathBuf::new()),
        (None, None) => return config_err("--config is required for this command"),
    };
    if cfg.schema_version() != SCHEMA_VERSION {
        return config_err(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            cfg.schema_version()
        ));
    }
    cfg.apply_overrides(ov.seed, ov.workers, ov.out.clone());
    if cfg.workers() == Some(0) {
        return config_err("workers must be at least 1");
    }
    let seed = cfg.seed().unwrap_or(default_seed);
    let out = cfg
        .out()
        .map_or_else(|| PathBuf::from(DEFAULT_OUT), Path::to_path_buf);
    Ok(Loaded {
        cfg,
        base,
        seed,
        out,
    })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v.is_finite() && v > 0.0) {
        return config_err(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

fn at_least_one(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return config_err(format!("{name} must be at least 1"));
    }
    Ok(())
}

fn check_grid(grid: &[usize]) -> Result<(), CliError> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return config_err(
            "m_grid must be a non-empty, strictly increasing list of positive sizes",
        );
    }
    Ok(())
}

fn load_points(
    points: &Option<Vec<Vec<f64>>>,
    points_csv: &Option<PathBuf>,
    base: &Path,
) -> Result<SampleMatrix, CliError> {
    let x = match (points, points_csv) {
        (Some(rows), None) => SampleMatrix::from_rows(rows),
        (None, Some(p)) => {
            let path = resolve(base, p);
            return SampleMatrix::read_csv_path(&path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())));
        }
        _ => return config_err("exactly one of `points` and `points_csv` is required"),
    };
    x.map_err(|e| CliError::Config(e.to_string()))
}

fn build_distribution(d: &DistributionConfig) -> Result<DistributionSpec, CliError> {
    d.build()
        .map_err(|e| CliError::Config(format!("distribution: {e}")))
}

fn write_json(
    dir: &Path,
    name: &str,
    value: &impl Serialize,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let path = dir.join(name);
    let file =
        File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    outputs.push(path);
    Ok(())
}

fn create(dir: &Path, name: &str, outputs: &mut Vec<PathBuf>) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let file =
        File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    outputs.push(path);
    Ok(BufWriter::new(file))
}

fn effective<T: Serialize + CommonFields + Clone>(cfg: &T, seed: u64) -> Value {
    let mut c = cfg.clone();
    c.apply_overrides(Some(seed), None, None);
    serde_json::to_value(c).expect("configs serialize")
}

pub fn prepare(cmd: CommandName, ov: &Overrides) -> Result<Prepared, CliError> {
    match cmd {
        CommandName::Kgamma => kgamma(ov),
        CommandName::LimitCert => limit_cert(ov),
        CommandName::ShatterCheck => shatter_check(ov),
        CommandName::FatDim => fat_dim(ov),
        CommandName::EigenProb => eigen_prob(ov),
        CommandName::MUnderline => m_underline_cmd(ov),
        CommandName::EdgeCheck => edge_check(ov),
        CommandName::LearnCurve => learn_curve(ov),
        CommandName::SampleComplexity => sample_complexity(ov),
        CommandName::ReproduceExamples => reproduce_cmd(ov),
    }
}

fn kgamma(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded {
        cfg,
        base,
        seed,
        out,
    } = load::<KgammaConfig>(ov, None, DEFAULT_SEED)?;
    positive("gamma", cfg.gamma)?;
    if let Some(a) = cfg.alpha {
        if !(a > 0.0 && a < 1.0) {
            return config_err(format!("alpha must lie in (0, 1), got {a}"));
        }
    }
    let spectrum = match (&cfg.spectrum, &cfg.spectrum_csv, &cfg.distribution) {
        (Some(v), None, None) => CovarianceSpectrum::new(v.clone()),
        (None, Some(p), None) => {
            let path = resolve(&base, p);
            CovarianceSpectrum::read_csv_path(&path)
                .map_err(|e| margin_complexity::Error::Invalid(format!("{}: {e}", path.display())))
        }
        (None, None, Some(d)) => Ok(build_distribution(d)?.spectrum()),
        _ => {
            return config_err(
                "exactly one of `spectrum`, `spectrum_csv` and `distribution` is required",
            )
        }
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    let (gamma, alpha) = (cfg.gamma, cfg.alpha);
    let job: Job = Box::new(move |dir| {
        let r = k_gamma(&spectrum, gamma)?;
        let growth = alpha
            .map(|a| check_growth_bound(&spectrum, gamma, a))
            .transpose()?;
        let mut outputs = Vec::new();
        let mut w = csv::Writer::from_writer(create(dir, "kgamma.csv", &mut outputs)?);
        w.write_record(["gamma", "k", "tail_sum", "trace", "dim"])
            .map_err(csv_err)?;
        w.write_record([
            gamma.to_string(),
            r.k.to_string(),
            r.tail_sum.to_string(),
            spectrum.trace().to_string(),
            spectrum.dim().to_string(),
        ])
        .map_err(csv_err)?;
        w.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(Outcome {
            outputs,
            summary: json!({
                "k": r.k,
                "gamma": gamma,
                "tail_sum": r.tail_sum,
                "trace": spectrum.trace(),
                "dim": spectrum.dim(),
                "growth": growth,
            }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn limit_cert(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded {
        cfg,
        base,
        seed,
        out,
    } = load::<LimitCertConfig>(ov, None, DEFAULT_SEED)?;
    let x = load_points(&cfg.points, &cfg.points_csv, &base)?;
    match (cfg.k, cfg.gamma) {
        (Some(k), None) if k <= x.dim() => {}
        (Some(k), None) => return config_err(format!("k = {k} exceeds dimension {}", x.dim())),
        (None, Some(g)) => positive("gamma", g)?,
        _ => return config_err("exactly one of `k` and `gamma` is required"),
    }
    let (k, gamma) = (cfg.k, cfg.gamma);
    let job: Job = Box::new(move |dir| {
        let k = match (k, gamma) {
            (Some(k), _) => k,
            (None, Some(g)) => set_k_gamma(&x, g)?.k,
            (None, None) => unreachable!("validated"),
        };
        let cert = set_limit_certificate(&x, k)?;
        let profile = set_limit_profile(&x);
        let mut outputs = Vec::new();
        write_json(dir, "limit_certificate.json", &cert, &mut outputs)?;
        let mut w = csv::Writer::from_writer(create(dir, "limit_profile.csv", &mut outputs)?);
        w.write_record(["k", "b"]).map_err(csv_err)?;
        for (k, b) in profile.iter().enumerate() {
            w.write_record([k.to_string(), b.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(Outcome {
            outputs,
            summary: json!({
                "k": cert.k,
                "b": cert.b,
                "gamma": gamma,
                "m": x.m(),
                "d": x.dim(),
                "orthonormality_error": cert.orthonormality_error(),
            }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn shatter_check(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded {
        cfg,
        base,
        seed,
        out,
    } = load::<ShatterCheckConfig>(ov, None, DEFAULT_SEED)?;
    positive("gamma", cfg.gamma)?;
    let x = load_points(&cfg.points, &cfg.points_csv, &base)?;
    let cap = cfg.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    if cap > 63 {
        return config_err("cap must be at most 63");
    }
    for y in &cfg.witnesses {
        if y.len() != x.m() || y.iter().any(|&v| v != 1 && v != -1) {
            return config_err(format!(
                "witness labelings must be ±1 vectors of length {}",
                x.m()
            ));
        }
    }
    let samples = cfg.screen_samples.unwrap_or(DEFAULT_SCREEN_SAMPLES);
    let gamma = cfg.gamma;
    let witnesses = cfg.witnesses.clone();
    let dump_qp = cfg.dump_qp;
    let job: Job = Box::new(move |dir| {
        let mut outputs = Vec::new();
        if x.m() > cap {
            let screen = sampled_shatter_screen(&x, gamma, samples, derive_seed(seed, &[0]))?;
            write_json(dir, "shatter_screen.json", &screen, &mut outputs)?;
            let verdict = if screen.lambda_min_sufficient {
                Some(true)
            } else if screen.refuted {
                Some(false)
            } else {
                None
            };
            return Ok(Outcome {
                outputs,
                summary: json!({
                    "shattered": verdict,
                    "exact": false,
                    "m": x.m(),
                    "d": x.dim(),
                    "gamma": gamma,
                    "lambda_min_sufficient": screen.lambda_min_sufficient,
                    "max_sampled_value": screen.max_sampled_value,
                }),
                complete: true,
            });
        }
        let mut cert = shatter_at_origin_with(&x, gamma, ShatterOptions { cap })?;
        if cert.shattered {
            for y in &witnesses {
                cert.add_witness(&x, y)?;
            }
        }
        write_json(dir, "shatter_certificate.json", &cert, &mut outputs)?;
        if dump_qp {
            if let Some(y) = &cert.worst_labeling {
                let mut a = x.matrix().clone();
                for (i, &l) in y.iter().enumerate() {
                    a.row_mut(i).scale_mut(f64::from(l));
                }
                let cs = ConstraintSystem::new(a, nalgebra::DVector::from_element(y.len(), gamma))?;
                let sol = solve_min_norm_ineq(&cs)?;
                write_json(
                    dir,
                    "qp_worst_labeling.json",
                    &json!({ "labeling": y, "solution": sol }),
                    &mut outputs,
                )?;
            }
        }
        Ok(Outcome {
            outputs,
            summary: json!({
                "shattered": cert.shattered,
                "exact": true,
                "m": x.m(),
                "d": x.dim(),
                "gamma": gamma,
                "worst_value": cert.worst_value,
                "gram_condition": cert.gram_condition,
                "lambda_min_sufficient": lambda_min_sufficient(&x, gamma),
                "witnesses": cert.witnesses.len(),
            }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn fat_dim(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded {
        cfg,
        base,
        seed,
        out,
    } = load::<FatDimConfig>(ov, None, DEFAULT_SEED)?;
    positive("gamma", cfg.gamma)?;
    let x = load_points(&cfg.points, &cfg.points_csv, &base)?;
    let max_subset = cfg.max_subset.unwrap_or(x.m().min(DEFAULT_ENUMERATION_CAP));
    if max_subset > DEFAULT_ENUMERATION_CAP {
        return config_err(format!(
            "max_subset must be at most {DEFAULT_ENUMERATION_CAP}"
        ));
    }
    let gamma = cfg.gamma;
    let job: Job = Box::new(move |dir| {
        let est = fat_shattering_search(&x, gamma, max_subset, ShatterOptions::default())?;
        let mut outputs = Vec::new();
        write_json(dir, "fat_shattering.json", &est, &mut outputs)?;
        Ok(Outcome {
            outputs,
            summary: json!({
                "lower": est.lower,
                "upper": est.upper,
                "gamma": gamma,
                "m": x.m(),
                "d": x.dim(),
                "max_subset": max_subset,
            }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn eigen_prob(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<EigenProbConfig>(ov, None, DEFAULT_SEED)?;
    positive("gamma", cfg.gamma)?;
    check_grid(&cfg.m_grid)?;
    let trials = cfg.trials.unwrap_or(randmat::DEFAULT_TRIALS);
    at_least_one("trials", trials)?;
    let spec = build_distribution(&cfg.distribution)?;
    let (gamma, grid, workers) = (cfg.gamma, cfg.m_grid.clone(), cfg.workers);
    let job: Job = Box::new(move |dir| {
        let estimates = grid
            .iter()
            .map(|&m| estimate_shatter_prob(&spec, gamma, m, trials, seed, workers))
            .collect::<Result<Vec<_>, _>>()?;
        let mut outputs = Vec::new();
        randmat::write_estimates_csv(create(dir, "eigen_prob.csv", &mut outputs)?, &estimates)?;
        let probs: Vec<Value> = estimates
            .iter()
            .map(|e| json!({"m": e.m, "prob": e.prob}))
            .collect();
        Ok(Outcome {
            outputs,
            summary: json!({ "gamma": gamma, "trials": trials, "estimates": probs }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn m_underline_cmd(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<MUnderlineConfig>(ov, None, DEFAULT_SEED)?;
    positive("gamma", cfg.gamma)?;
    at_least_one("m_max", cfg.m_max)?;
    let trials = cfg.trials.unwrap_or(randmat::DEFAULT_TRIALS);
    at_least_one("trials", trials)?;
    let spec = build_distribution(&cfg.distribution)?;
    let (gamma, m_max, workers) = (cfg.gamma, cfg.m_max, cfg.workers);
    let job: Job = Box::new(move |dir| {
        let r = m_underline(&spec, gamma, m_max, trials, seed, workers)?;
        let mut outputs = Vec::new();
        randmat::write_estimates_csv(create(dir, "m_underline.csv", &mut outputs)?, &r.estimates)?;
        Ok(Outcome {
            outputs,
            summary: json!({
                "m_underline": r.m_underline,
                "first_failing_m": r.first_failing_m,
                "gamma": gamma,
                "trials": trials,
            }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn edge_check(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<EdgeCheckConfig>(ov, None, DEFAULT_SEED)?;
    if cfg.betas.is_empty() || cfg.betas.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
        return config_err("betas must be a non-empty list of values in (0, 1)");
    }
    if cfg.d < 2 {
        return config_err("d must be at least 2");
    }
    let trials = cfg.trials.unwrap_or(DEFAULT_EDGE_TRIALS);
    at_least_one("trials", trials)?;
    let spec = build_distribution(&cfg.distribution)?;
    if spec.iid_law().is_none() {
        return config_err("edge-check needs a distribution with i.i.d. coordinates");
    }
    let (betas, d, workers) = (cfg.betas.clone(), cfg.d, cfg.workers);
    let job: Job = Box::new(move |dir| {
        let reports = betas
            .iter()
            .map(|&b| edge_mc_compare(&spec, b, d, trials, seed, workers))
            .collect::<Result<Vec<_>, _>>()?;
        let mut outputs = Vec::new();
        randmat::write_edge_csv(create(dir, "edge.csv", &mut outputs)?, &reports)?;
        let worst = reports.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        Ok(Outcome {
            outputs,
            summary: json!({ "d": d, "trials": trials, "max_rel_error": worst }),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn curve_summary(c: &LearningCurve) -> Value {
    let last = c.entries.last();
    json!({
        "learner": c.learner_kind,
        "gamma": c.gamma,
        "distribution_digest": c.distribution_digest,
        "optimal_margin_loss": c.optimal_margin_loss,
        "final_m": last.map(|e| e.m),
        "final_mean_test_error": last.map(|e| e.mean_test_error),
    })
}

struct CurveJob {
    spec: DistributionSpec,
    gamma: f64,
    grid: Vec<usize>,
    trials: usize,
    learner: LearnerKind,
    workers: Option<usize>,
}

fn curve_job(
    distribution: &DistributionConfig,
    gamma: f64,
    grid: &[usize],
    trials: usize,
    learner: LearnerKind,
    workers: Option<usize>,
) -> Result<CurveJob, CliError> {
    positive("gamma", gamma)?;
    check_grid(grid)?;
    at_least_one("trials", trials)?;
    Ok(CurveJob {
        spec: build_distribution(distribution)?,
        gamma,
        grid: grid.to_vec(),
        trials,
        learner,
        workers,
    })
}

impl CurveJob {
    fn run(
        &self,
        seed: u64,
        dir: &Path,
        outputs: &mut Vec<PathBuf>,
    ) -> Result<LearningCurve, CliError> {
        let c = learning_curve(
            &self.spec,
            self.gamma,
            &self.grid,
            self.trials,
            self.learner,
            seed,
            self.workers,
        )?;
        write_curve_csv(create(dir, "learning_curve.csv", outputs)?, &c)?;
        Ok(c)
    }
}

fn learn_curve(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<LearnCurveConfig>(ov, None, DEFAULT_SEED)?;
    let cj = curve_job(
        &cfg.distribution,
        cfg.gamma,
        &cfg.m_grid,
        cfg.trials,
        cfg.learner,
        cfg.workers,
    )?;
    let job: Job = Box::new(move |dir| {
        let mut outputs = Vec::new();
        let c = cj.run(seed, dir, &mut outputs)?;
        Ok(Outcome {
            outputs,
            summary: curve_summary(&c),
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn sample_complexity(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<SampleComplexityConfig>(ov, None, DEFAULT_SEED)?;
    positive("epsilon", cfg.epsilon)?;
    let cj = curve_job(
        &cfg.distribution,
        cfg.gamma,
        &cfg.m_grid,
        cfg.trials,
        cfg.learner,
        cfg.workers,
    )?;
    let epsilon = cfg.epsilon;
    let job: Job = Box::new(move |dir| {
        let mut outputs = Vec::new();
        let c = cj.run(seed, dir, &mut outputs)?;
        let m = empirical_sample_complexity(&c, epsilon)?;
        let mut summary = curve_summary(&c);
        summary["epsilon"] = json!(epsilon);
        summary["sample_complexity"] = json!(m);
        Ok(Outcome {
            outputs,
            summary,
            complete: true,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}

fn reproduce_cmd(ov: &Overrides) -> Result<Prepared, CliError> {
    let Loaded { cfg, seed, out, .. } = load::<ReproduceConfig>(
        ov,
        Some(ReproduceConfig::default()),
        reproduce::DEFAULT_SEED,
    )?;
    let trials = cfg.trials.unwrap_or(reproduce::DEFAULT_TRIALS);
    at_least_one("trials", trials)?;
    let budget = match cfg.budget_seconds {
        Some(s) => {
            positive("budget_seconds", s)?;
            Duration::from_secs_f64(s)
        }
        None => reproduce::DEFAULT_BUDGET,
    };
    let opts = ReproduceOptions {
        seed,
        trials,
        workers: cfg.workers,
        budget,
    };
    let job: Job = Box::new(move |dir| {
        let report = reproduce_examples(&opts)?;
        let mut outputs = Vec::new();
        reproduce::write_table_csv(create(dir, "examples_table.csv", &mut outputs)?, &report)?;
        for run in report.spiky.iter().chain(&report.bernoulli) {
            write_curve_csv(
                create(dir, &format!("curve_{}.csv", run.name), &mut outputs)?,
                &run.curve,
            )?;
        }
        for run in &report.mixture {
            for c in [&run.generative, &run.discriminative] {
                let name = format!("curve_{}_{}.csv", run.name, c.learner_kind);
                write_curve_csv(create(dir, &name, &mut outputs)?, c)?;
            }
        }
        let summary = json!({
            "trials": trials,
            "elapsed_seconds": report.elapsed_seconds,
            "spiky": report.spiky.as_ref().map(|r| json!({
                "k_gamma": r.k_gamma,
                "sample_complexity": r.sample_complexity,
            })),
            "bernoulli": report.bernoulli.iter().map(|r| json!({
                "d": r.d,
                "k_gamma": r.k_gamma,
                "sample_complexity": r.sample_complexity,
            })).collect::<Vec<_>>(),
            "bernoulli_complexity_ratio": report.bernoulli_complexity_ratio,
            "mixture": report.mixture.iter().map(|r| json!({
                "v": r.v,
                "k_gamma": r.k_gamma,
                "generative_reach": r.generative_reach,
                "discriminative_reach": r.discriminative_reach,
            })).collect::<Vec<_>>(),
        });
        Ok(Outcome {
            outputs,
            summary,
            complete: report.complete,
        })
    });
    Ok(Prepared {
        effective: effective(&cfg, seed),
        seed,
        out,
        job,
    })
}
