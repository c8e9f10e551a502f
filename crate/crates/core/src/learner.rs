//! Margin-error minimization and learning-curve harnesses.
//!
//! A point meets margin `γ` when `y⟨x, w⟩ ≥ γ − 1e-8·max(1, γ)`; the empirical
//! margin loss is the fraction of points that do not. Test error is the
//! fraction with `y·score ≤ 0`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dist::{sample, DistributionSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::gram;
use crate::optim::{min_norm_interpolator, solve_min_norm_ineq, ConstraintSystem};
use crate::parallel::map_trials;
use crate::sample::{LabeledSample, SampleMatrix};
use crate::seeding::derive_seed;
use crate::shatter::{is_shattered_at_origin, next_combination, ShatterOptions};

pub const MARGIN_TOLERANCE: f64 = 1e-8;

/// Largest sample exact mode accepts (at most 2^16 feasibility problems).
pub const EXACT_CAP: usize = 16;

pub const HEURISTIC_RESTARTS: usize = 10;
pub const HEURISTIC_ITERATIONS: usize = 400;

/// Monte Carlo draws used to estimate the reference separator's margin loss.
pub const OPTIMAL_LOSS_DRAWS: usize = 100_000;

const FEASIBLE_NORM_SQ: f64 = 1.0 + 1e-9;
const RESTART_SEED: u64 = 0x6d61_7267_696e;

pub fn meets_margin(margin: f64, gamma: f64) -> bool {
    margin >= gamma - MARGIN_TOLERANCE * gamma.max(1.0)
}

/// Empirical margin loss `ℓ̂_γ(w, S)`.
pub fn margin_loss(s: &LabeledSample, w: &DVector<f64>, gamma: f64) -> f64 {
    let misses = s
        .margins(w)
        .into_iter()
        .filter(|&t| !meets_margin(t, gamma))
        .count();
    misses as f64 / s.m() as f64
}

/// Mean of `max(0, γ − y⟨x, w⟩)`.
pub fn hinge_loss(s: &LabeledSample, w: &DVector<f64>, gamma: f64) -> f64 {
    s.margins(w)
        .into_iter()
        .map(|t| (gamma - t).max(0.0))
        .sum::<f64>()
        / s.m() as f64
}

/// Fraction of points with `y⟨x, w⟩ ≤ 0`.
pub fn misclassification(s: &LabeledSample, w: &DVector<f64>) -> f64 {
    let wrong = s.margins(w).into_iter().filter(|&t| t <= 0.0).count();
    wrong as f64 / s.m() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErmMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerOutput {
    pub w: Vec<f64>,
    pub train_margin_loss: f64,
    pub mode: ErmMode,
    pub optimality_certified: bool,
}

impl LearnerOutput {
    pub fn w_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.w)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        invalid(format!("gamma must be positive, got {gamma}"))
    }
}

fn into_unit_ball(mut w: DVector<f64>) -> DVector<f64> {
    let n = w.norm();
    if n > 1.0 {
        w /= n;
    }
    w
}

/// Rows `y_i x_i`.
fn signed_rows(s: &LabeledSample) -> DMatrix<f64> {
    let mut a = s.points().matrix().clone();
    for (i, &y) in s.labels().iter().enumerate() {
        if y < 0 {
            a.row_mut(i).neg_mut();
        }
    }
    a
}

/// Min-norm `w` meeting margin `γ` on the rows `idx`, if its norm is at most 1.
fn feasible_on(a: &DMatrix<f64>, idx: &[usize], gamma: f64) -> Result<Option<DVector<f64>>> {
    let rows = a.select_rows(idx);
    let cs = ConstraintSystem::new(rows, DVector::from_element(idx.len(), gamma))?;
    let sol = solve_min_norm_ineq(&cs)?;
    Ok((sol.is_optimal() && sol.objective <= FEASIBLE_NORM_SQ)
        .then(|| into_unit_ball(sol.w_vector())))
}

/// Unit-ball predictor minimizing the empirical margin loss.
///
/// Exact mode scans satisfaction patterns from largest to smallest (each size
/// in lexicographic order) and returns the first feasible one. Heuristic mode
/// runs projected subgradient descent on the hinge loss at `γ` from
/// [`HEURISTIC_RESTARTS`] starting points, then re-solves the min-norm problem
/// on the points each run satisfies.
pub fn margin_error_minimize(
    s: &LabeledSample,
    gamma: f64,
    mode: ErmMode,
) -> Result<LearnerOutput> {
    check_gamma(gamma)?;
    let w = match mode {
        ErmMode::Exact => {
            if s.m() > EXACT_CAP {
                return Err(Error::CapExceeded {
                    what: "exact margin-error minimization (use heuristic mode)",
                    size: s.m(),
                    cap: EXACT_CAP,
                });
            }
            exact_minimizer(s, gamma)?
        }
        ErmMode::Heuristic => heuristic_minimizer(s, gamma)?,
    };
    Ok(LearnerOutput {
        train_margin_loss: margin_loss(s, &w, gamma),
        w: w.as_slice().to_vec(),
        mode,
        optimality_certified: mode == ErmMode::Exact,
    })
}

fn exact_minimizer(s: &LabeledSample, gamma: f64) -> Result<DVector<f64>> {
    let m = s.m();
    let a = signed_rows(s);
    for size in (1..=m).rev() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if let Some(w) = feasible_on(&a, &idx, gamma)? {
                return Ok(w);
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    Ok(DVector::zeros(s.dim()))
}

fn heuristic_minimizer(s: &LabeledSample, gamma: f64) -> Result<DVector<f64>> {
    let x = s.points().matrix();
    let (m, d) = x.shape();
    let y: Vec<f64> = s.labels().iter().map(|&l| f64::from(l)).collect();
    let g = gram(x);
    let radius = (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max).sqrt();
    if radius == 0.0 {
        return Ok(DVector::zeros(d));
    }
    let a = signed_rows(s);

    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for restart in 0..HEURISTIC_RESTARTS {
        // w = c·w0 + X'β, tracked through u = X w0 and Gβ
        let (w0, mut c) = if restart == 0 {
            (DVector::zeros(d), 0.0)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(RESTART_SEED, &[restart as u64]));
            let v = DVector::<f64>::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            let n = v.norm();
            (v / n, 1.0)
        };
        let u = x * &w0;
        let mut beta = DVector::<f64>::zeros(m);
        let mut gb = DVector::<f64>::zeros(m);
        let score = |c: f64, gb: &DVector<f64>| -> (usize, f64) {
            let mut misses = 0;
            let mut hinge = 0.0;
            for i in 0..m {
                let t = y[i] * (c * u[i] + gb[i]);
                if !meets_margin(t, gamma) {
                    misses += 1;
                }
                hinge += (gamma - t).max(0.0);
            }
            (misses, hinge)
        };
        let mut run_best = (score(c, &gb), c, beta.clone());
        for t in 1..=HEURISTIC_ITERATIONS {
            let eta = 2.0 / (radius * (t as f64).sqrt());
            let violated: Vec<usize> = (0..m)
                .filter(|&i| y[i] * (c * u[i] + gb[i]) < gamma)
                .collect();
            for i in violated {
                let step = eta * y[i] / m as f64;
                beta[i] += step;
                gb.axpy(step, &g.column(i), 1.0);
            }
            let norm_sq = c * c * w0.norm_squared() + 2.0 * c * beta.dot(&u) + beta.dot(&gb);
            if norm_sq > 1.0 {
                let f = norm_sq.sqrt().recip();
                c *= f;
                beta *= f;
                gb *= f;
            }
            let sc = score(c, &gb);
            if sc.0 < run_best.0 .0 || (sc.0 == run_best.0 .0 && sc.1 < run_best.0 .1) {
                run_best = (sc, c, beta.clone());
            }
        }
        let (_, c_best, beta_best) = run_best;
        let w = into_unit_ball(&w0 * c_best + x.transpose() * beta_best);
        let w = polish(s, &a, &w, gamma)?;
        let loss = margin_loss(s, &w, gamma);
        let hinge = hinge_loss(s, &w, gamma);
        let better = match &best {
            None => true,
            Some((bl, bh, _)) => loss < *bl || (loss == *bl && hinge < *bh),
        };
        if better {
            best = Some((loss, hinge, w));
        }
    }
    Ok(best.expect("at least one restart").2)
}

/// Replaces `w` by the min-norm predictor meeting the margin on the points
/// `w` already satisfies, unless that loses ground.
fn polish(
    s: &LabeledSample,
    a: &DMatrix<f64>,
    w: &DVector<f64>,
    gamma: f64,
) -> Result<DVector<f64>> {
    let satisfied: Vec<usize> = s
        .margins(w)
        .into_iter()
        .enumerate()
        .filter(|&(_, t)| meets_margin(t, gamma))
        .map(|(i, _)| i)
        .collect();
    if satisfied.is_empty() {
        return Ok(w.clone());
    }
    match feasible_on(a, &satisfied, gamma)? {
        Some(p) if margin_loss(s, &p, gamma) <= margin_loss(s, w, gamma) => Ok(p),
        _ => Ok(w.clone()),
    }
}

/// Zero-train-loss predictor that misclassifies every test point relative to
/// `designated` labels: the min-norm interpolator of `+γ y` on the training
/// rows and `−γ ŷ` on the test rows. Requires the stacked rows to be
/// γ-shattered at the origin.
pub fn adversarial_minimizer(
    train: &LabeledSample,
    test_points: &SampleMatrix,
    designated: &[i8],
    gamma: f64,
    opts: ShatterOptions,
) -> Result<DVector<f64>> {
    check_gamma(gamma)?;
    if designated.len() != test_points.m() || designated.iter().any(|&l| l != 1 && l != -1) {
        return invalid("designated test labels must be ±1, one per test point");
    }
    let combined = train.points().stack(test_points)?;
    if !is_shattered_at_origin(&combined, gamma, opts)? {
        return Err(Error::NotShattered { gamma });
    }
    let targets: Vec<f64> = train
        .labels()
        .iter()
        .map(|&l| gamma * f64::from(l))
        .chain(designated.iter().map(|&l| -gamma * f64::from(l)))
        .collect();
    let w = into_unit_ball(min_norm_interpolator(
        &combined,
        &DVector::from_vec(targets),
    )?);

    if margin_loss(train, &w, gamma) != 0.0 {
        return Err(Error::Invariant(
            "adversarial predictor has positive train margin loss".into(),
        ));
    }
    let test_scores = test_points.matrix() * &w;
    if test_scores
        .iter()
        .zip(designated)
        .any(|(s, &l)| f64::from(l) * s > 0.0)
    {
        return Err(Error::Invariant(
            "adversarial predictor classifies a test point correctly".into(),
        ));
    }
    Ok(w)
}

/// Nearest-class-mean rule `sign⟨w, x − midpoint⟩` with `w` the unit
/// direction of `μ̂₊ − μ̂₋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestMean {
    pub w: Vec<f64>,
    pub midpoint: Vec<f64>,
}

impl NearestMean {
    pub fn w_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.w)
    }

    /// Scores `⟨w, x_i − midpoint⟩` for every row.
    pub fn scores(&self, x: &SampleMatrix) -> DVector<f64> {
        let w = self.w_vector();
        let offset: f64 = self.w.iter().zip(&self.midpoint).map(|(a, b)| a * b).sum();
        (x.matrix() * w).add_scalar(-offset)
    }
}

pub fn generative_nearest_mean(s: &LabeledSample) -> Result<NearestMean> {
    let x = s.points().matrix();
    let d = s.dim();
    let mut mean_pos = DVector::zeros(d);
    let mut mean_neg = DVector::zeros(d);
    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    for (i, &l) in s.labels().iter().enumerate() {
        let row = x.row(i).transpose();
        if l > 0 {
            mean_pos += row;
            n_pos += 1;
        } else {
            mean_neg += row;
            n_neg += 1;
        }
    }
    if n_pos == 0 || n_neg == 0 {
        return invalid("nearest-mean rule needs both classes in the sample");
    }
    mean_pos /= n_pos as f64;
    mean_neg /= n_neg as f64;
    let diff = &mean_pos - &mean_neg;
    let scale = x.amax().max(1.0);
    let n = diff.norm();
    if n <= 1e-12 * scale {
        return invalid("class means coincide; nearest-mean direction is undefined");
    }
    Ok(NearestMean {
        w: (diff / n).as_slice().to_vec(),
        midpoint: ((mean_pos + mean_neg) * 0.5).as_slice().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    ErmExact,
    ErmHeuristic,
    Adversarial,
    Generative,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::ErmExact => "erm_exact",
            LearnerKind::ErmHeuristic => "erm_heuristic",
            LearnerKind::Adversarial => "adversarial",
            LearnerKind::Generative => "generative",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            LearnerKind::ErmExact,
            LearnerKind::ErmHeuristic,
            LearnerKind::Adversarial,
            LearnerKind::Generative,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown learner kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub m: usize,
    pub mean_test_error: f64,
    pub std_error: f64,
    pub trials: usize,
    pub mean_train_margin_loss: f64,
    pub max_train_margin_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub gamma: f64,
    pub learner_kind: LearnerKind,
    pub distribution_digest: String,
    pub seed: u64,
    /// Margin loss of the label model's reference separator, a proxy for
    /// `ℓ*_γ`; `None` when the label model has no reference direction.
    pub optimal_margin_loss: Option<f64>,
    pub entries: Vec<CurveEntry>,
}

/// Monte Carlo estimate of `ℓ_γ(w*, D)` for the reference direction `w*`.
pub fn reference_margin_loss(
    spec: &DistributionSpec,
    gamma: f64,
    draws: usize,
    seed: u64,
) -> Result<Option<f64>> {
    check_gamma(gamma)?;
    let Some(w) = spec.reference_direction() else {
        return Ok(None);
    };
    if draws == 0 {
        return invalid("draws must be positive");
    }
    const CHUNK: usize = 2048;
    let mut misses = 0usize;
    let mut done = 0usize;
    for chunk in 0.. {
        if done == draws {
            break;
        }
        let n = CHUNK.min(draws - done);
        let s = sample(spec, n, derive_seed(seed, &[chunk]))?;
        misses += s
            .margins(&w)
            .into_iter()
            .filter(|&t| !meets_margin(t, gamma))
            .count();
        done += n;
    }
    Ok(Some(misses as f64 / draws as f64))
}

fn validate_grid(m_grid: &[usize]) -> Result<()> {
    if m_grid.is_empty() || m_grid[0] == 0 || m_grid.windows(2).any(|p| p[0] >= p[1]) {
        return invalid("m_grid must be non-empty, positive and strictly increasing");
    }
    Ok(())
}

/// Test error and train margin loss of one trial. Trial `t` draws its
/// training sample from `derive_seed(seed, [t, 0])` and its test sample from
/// `derive_seed(seed, [t, 1])`, so samples nest across `m`.
fn run_trial(
    spec: &DistributionSpec,
    gamma: f64,
    m: usize,
    kind: LearnerKind,
    seed: u64,
    t: u64,
) -> Result<(f64, f64)> {
    let train = sample(spec, m, derive_seed(seed, &[t, 0]))?;
    let test = sample(spec, m, derive_seed(seed, &[t, 1]))?;
    match kind {
        LearnerKind::ErmExact | LearnerKind::ErmHeuristic => {
            let mode = if kind == LearnerKind::ErmExact {
                ErmMode::Exact
            } else {
                ErmMode::Heuristic
            };
            let out = margin_error_minimize(&train, gamma, mode)?;
            Ok((
                misclassification(&test, &out.w_vector()),
                out.train_margin_loss,
            ))
        }
        LearnerKind::Adversarial => {
            let designated: Vec<i8> = (0..m)
                .map(|i| spec.designated_label(test.points().row_vec(i).as_slice()))
                .collect();
            let w = adversarial_minimizer(
                &train,
                test.points(),
                &designated,
                gamma,
                ShatterOptions::default(),
            )?;
            Ok((misclassification(&test, &w), margin_loss(&train, &w, gamma)))
        }
        LearnerKind::Generative => {
            let labels = train.labels();
            if labels.iter().all(|&l| l == labels[0]) {
                // only one class seen: predict it everywhere
                let wrong = test.labels().iter().filter(|&&l| l != labels[0]).count();
                return Ok((wrong as f64 / m as f64, 1.0));
            }
            let rule = generative_nearest_mean(&train)?;
            let signed = |s: &LabeledSample| -> Vec<f64> {
                rule.scores(s.points())
                    .iter()
                    .zip(s.labels())
                    .map(|(v, &l)| f64::from(l) * v)
                    .collect()
            };
            let test_err = signed(&test).iter().filter(|&&v| v <= 0.0).count() as f64 / m as f64;
            let train_loss = signed(&train)
                .iter()
                .filter(|&&v| !meets_margin(v, gamma))
                .count() as f64
                / m as f64;
            Ok((test_err, train_loss))
        }
    }
}

/// Mean test error over `trials` train/test pairs of equal size `m`, for each
/// `m` in the grid.
pub fn learning_curve(
    spec: &DistributionSpec,
    gamma: f64,
    m_grid: &[usize],
    trials: usize,
    kind: LearnerKind,
    seed: u64,
    workers: Option<usize>,
) -> Result<LearningCurve> {
    check_gamma(gamma)?;
    validate_grid(m_grid)?;
    if trials == 0 {
        return invalid("trials must be positive");
    }
    let mut entries = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        let results = map_trials(trials, workers, |t| {
            run_trial(spec, gamma, m, kind, seed, t as u64)
        })
        .map_err(|e| Error::AtSampleSize {
            m,
            source: Box::new(e),
        })?;
        let n = trials as f64;
        let mean = results.iter().map(|r| r.0).sum::<f64>() / n;
        let std_error = if trials > 1 {
            let var = results.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        entries.push(CurveEntry {
            m,
            mean_test_error: mean,
            std_error,
            trials,
            mean_train_margin_loss: results.iter().map(|r| r.1).sum::<f64>() / n,
            max_train_margin_loss: results.iter().map(|r| r.1).fold(0.0, f64::max),
        });
    }
    let optimal_margin_loss = reference_margin_loss(
        spec,
        gamma,
        OPTIMAL_LOSS_DRAWS,
        derive_seed(seed, &[u64::MAX]),
    )?;
    Ok(LearningCurve {
        gamma,
        learner_kind: kind,
        distribution_digest: spec.digest(),
        seed,
        optimal_margin_loss,
        entries,
    })
}

/// Smallest grid `m` with `mean_test_error − ℓ*_γ ≤ ε`; `None` if never.
pub fn empirical_sample_complexity(curve: &LearningCurve, epsilon: f64) -> Result<Option<usize>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let Some(opt) = curve.optimal_margin_loss else {
        return invalid("learning curve has no estimate of the optimal margin loss");
    };
    Ok(curve
        .entries
        .iter()
        .find(|e| e.mean_test_error - opt <= epsilon)
        .map(|e| e.m))
}

/// Columns `m,mean_test_error,std_error,trials,learner_kind,gamma,seed`.
pub fn write_curve_csv<W: Write>(writer: W, curve: &LearningCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "m",
        "mean_test_error",
        "std_error",
        "trials",
        "learner_kind",
        "gamma",
        "seed",
    ])?;
    for e in &curve.entries {
        w.write_record([
            e.m.to_string(),
            e.mean_test_error.to_string(),
            e.std_error.to_string(),
            e.trials.to_string(),
            curve.learner_kind.name().to_string(),
            curve.gamma.to_string(),
            curve.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist;

    fn labeled(rows: &[Vec<f64>], labels: &[i8]) -> LabeledSample {
        LabeledSample::new(SampleMatrix::from_rows(rows).unwrap(), labels.to_vec()).unwrap()
    }

    #[test]
    fn separable_sample_has_zero_loss() {
        let s = labeled(
            &[vec![2.0, 0.1], vec![1.5, -0.3], vec![-2.0, 0.4]],
            &[1, 1, -1],
        );
        for mode in [ErmMode::Exact, ErmMode::Heuristic] {
            let out = margin_error_minimize(&s, 1.0, mode).unwrap();
            assert_eq!(out.train_margin_loss, 0.0, "{mode:?}");
            assert!(out.w_vector().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn xor_through_origin() {
        // x and -x carry the same label, so at most one of each antipodal pair
        // can meet a positive margin
        let s = labeled(
            &[
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
            ],
            &[1, -1, -1, 1],
        );
        let exact = margin_error_minimize(&s, 0.1, ErmMode::Exact).unwrap();
        assert_eq!(exact.train_margin_loss, 0.5);
        assert!(exact.optimality_certified);
        let heur = margin_error_minimize(&s, 0.1, ErmMode::Heuristic).unwrap();
        assert!(heur.train_margin_loss >= exact.train_margin_loss);
        assert!(!heur.optimality_certified);
    }

    #[test]
    fn single_point() {
        let s = labeled(&[vec![3.0, 4.0]], &[-1]);
        let out = margin_error_minimize(&s, 5.0, ErmMode::Exact).unwrap();
        assert_eq!(out.train_margin_loss, 0.0);
        assert!((out.w_vector() - DVector::from_vec(vec![-0.6, -0.8])).amax() < 1e-9);
    }

    #[test]
    fn exact_cap() {
        let rows: Vec<Vec<f64>> = (0..17).map(|i| vec![i as f64 + 1.0]).collect();
        let s = labeled(&rows, &[1; 17]);
        assert!(matches!(
            margin_error_minimize(&s, 1.0, ErmMode::Exact),
            Err(Error::CapExceeded {
                size: 17,
                cap: 16,
                ..
            })
        ));
    }

    #[test]
    fn adversarial_example() {
        let r2 = 2f64.sqrt();
        let train = labeled(&[vec![r2, 0.0]], &[1]);
        let test = SampleMatrix::from_rows(&[vec![0.0, r2]]).unwrap();
        let w = adversarial_minimizer(&train, &test, &[1], 1.0, ShatterOptions::default()).unwrap();
        assert!((w[0] - r2 / 2.0).abs() < 1e-12 && (w[1] + r2 / 2.0).abs() < 1e-12);

        let dup = SampleMatrix::from_rows(&[vec![r2, 0.0]]).unwrap();
        assert!(matches!(
            adversarial_minimizer(&train, &dup, &[1], 1.0, ShatterOptions::default()),
            Err(Error::NotShattered { .. })
        ));
    }

    #[test]
    fn nearest_mean_examples() {
        let s = labeled(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[1, -1]);
        let r = generative_nearest_mean(&s).unwrap();
        assert_eq!(r.w, vec![1.0, 0.0]);
        assert_eq!(r.midpoint, vec![0.0, 0.0]);
        let same = labeled(&[vec![1.0, 2.0], vec![1.0, 2.0]], &[1, -1]);
        assert!(generative_nearest_mean(&same).is_err());
        let one = labeled(&[vec![1.0, 2.0]], &[1]);
        assert!(generative_nearest_mean(&one).is_err());
    }

    #[test]
    fn nearest_mean_on_mixture() {
        let spec = dist::gaussian_mixture(100, 4.0).unwrap();
        let train = sample(&spec, 200, 11).unwrap();
        let test = sample(&spec, 2000, 12).unwrap();
        let rule = generative_nearest_mean(&train).unwrap();
        let scores = rule.scores(test.points());
        let wrong = scores
            .iter()
            .zip(test.labels())
            .filter(|(v, &l)| f64::from(l) * **v <= 0.0)
            .count();
        assert!((wrong as f64 / 2000.0) <= 0.05);
    }

    fn curve_with(entries: &[(usize, f64)], opt: Option<f64>) -> LearningCurve {
        LearningCurve {
            gamma: 1.0,
            learner_kind: LearnerKind::ErmExact,
            distribution_digest: String::new(),
            seed: 0,
            optimal_margin_loss: opt,
            entries: entries
                .iter()
                .map(|&(m, e)| CurveEntry {
                    m,
                    mean_test_error: e,
                    std_error: 0.0,
                    trials: 1,
                    mean_train_margin_loss: 0.0,
                    max_train_margin_loss: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn sample_complexity_scan() {
        let c = curve_with(&[(10, 0.30), (20, 0.10)], Some(0.02));
        assert_eq!(empirical_sample_complexity(&c, 0.1).unwrap(), Some(20));
        assert_eq!(empirical_sample_complexity(&c, 0.01).unwrap(), None);
        assert!(empirical_sample_complexity(&curve_with(&[(1, 0.0)], None), 0.1).is_err());
        assert!(empirical_sample_complexity(&c, 1.0).is_err());
    }

    #[test]
    fn learner_kind_names() {
        for k in [
            LearnerKind::ErmExact,
            LearnerKind::ErmHeuristic,
            LearnerKind::Adversarial,
            LearnerKind::Generative,
        ] {
            assert_eq!(k.name().parse::<LearnerKind>().unwrap(), k);
            assert_eq!(
                serde_json::to_string(&k).unwrap(),
                format!("\"{}\"", k.name())
            );
        }
        assert!("svm".parse::<LearnerKind>().is_err());
    }

    #[test]
    fn grid_validation() {
        let spec = dist::isotropic_gaussian(3, 1.0).unwrap();
        for grid in [&[][..], &[0, 2][..], &[3, 3][..], &[4, 2][..]] {
            assert!(learning_curve(&spec, 1.0, grid, 2, LearnerKind::ErmExact, 0, None).is_err());
        }
    }

    #[test]
    fn cap_error_names_sample_size() {
        let spec = dist::bernoulli(4).unwrap();
        match learning_curve(&spec, 1.0, &[4, 17], 2, LearnerKind::ErmExact, 0, None) {
            Err(Error::AtSampleSize { m: 17, source }) => {
                assert!(matches!(*source, Error::CapExceeded { .. }))
            }
            other => panic!("{other:?}"),
        }
    }
}
