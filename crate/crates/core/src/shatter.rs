//! Fat-shattering certification of finite point sets.
//!
//! A set of rows `X` is γ-shattered at the origin iff `XX'` is invertible and
//! `γ² y'(XX')⁻¹y ≤ 1` for every sign vector `y`; the minimum-norm
//! interpolator of `Xw = γy` is then a witness separator. Exact certification
//! enumerates `2^{m-1}` labelings (`y` and `-y` give the same form).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, GramFactor};
use crate::optim::{self, ConstraintSystem};
use crate::sample::SampleMatrix;
use crate::spectral;

/// Default cap on `m` for exhaustive labeling enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Slack on the `worst_value ≤ 1` comparison.
pub const WORST_VALUE_SLACK: f64 = 1e-9;

/// Largest number of subsets `fat_shattering_search` will visit.
pub const SUBSET_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShatterOptions {
    pub cap: usize,
}

impl Default for ShatterOptions {
    fn default() -> Self {
        ShatterOptions {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub labeling: Vec<i8>,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterCertificate {
    pub shattered: bool,
    pub gamma: f64,
    /// Labeling maximizing `y'(XX'/γ²)⁻¹y`, with first entry `+1`. `None` when
    /// the Gram matrix is singular.
    pub worst_labeling: Option<Vec<i8>>,
    pub worst_value: Option<f64>,
    /// Smallest to largest eigenvalue ratio of `XX'`.
    pub gram_condition: f64,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
}

impl ShatterCertificate {
    /// Builds and stores the witness separator for `labeling`. Only valid for
    /// shattered sets.
    pub fn add_witness(&mut self, x: &SampleMatrix, labeling: &[i8]) -> Result<&Witness> {
        if !self.shattered {
            return invalid("witnesses exist only for shattered sets");
        }
        let w = witness(x, self.gamma, labeling)?;
        self.witnesses.push(Witness {
            labeling: labeling.to_vec(),
            w: w.iter().copied().collect(),
        });
        Ok(self.witnesses.last().expect("just pushed"))
    }
}

/// Sign vector for enumeration index `code`: entry 0 is `+1`, entry `i`
/// is `-1` iff bit `i - 1` of `code` is set.
pub fn labeling_from_code(code: u64, m: usize) -> Vec<i8> {
    (0..m)
        .map(|i| {
            if i > 0 && (code >> (i - 1)) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .collect()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return invalid(format!("gamma must be positive and finite, got {gamma}"));
    }
    Ok(())
}

/// `y'Ay` for the sign vector encoded by `code`, using the upper triangle.
fn sign_quad_form(a: &DMatrix<f64>, code: u64) -> f64 {
    let m = a.nrows();
    let sign = |i: usize| -> f64 {
        if i > 0 && (code >> (i - 1)) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..m {
        diag += a[(i, i)];
        let si = sign(i);
        let mut row = 0.0;
        for j in (i + 1)..m {
            row += a[(i, j)] * sign(j);
        }
        off += si * row;
    }
    diag + 2.0 * off
}

/// Maximum of `y'Ay` over sign vectors with `y_0 = +1`; ties go to the
/// smaller code. Each value is evaluated independently so the result does not
/// depend on how the range is split across threads.
fn max_sign_quad_form(a: &DMatrix<f64>) -> (u64, f64) {
    let m = a.nrows();
    let total: u64 = 1 << (m - 1);
    let better = |x: (u64, f64), y: (u64, f64)| {
        if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
            y
        } else {
            x
        }
    };
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            (lo..hi)
                .map(|code| (code, sign_quad_form(a, code)))
                .fold((u64::MAX, f64::NEG_INFINITY), better)
        })
        .reduce(|| (u64::MAX, f64::NEG_INFINITY), better)
}

/// Exact γ-shattering verdict at the origin by labeling enumeration.
pub fn shatter_at_origin(x: &SampleMatrix, gamma: f64) -> Result<ShatterCertificate> {
    shatter_at_origin_with(x, gamma, ShatterOptions::default())
}

pub fn shatter_at_origin_with(
    x: &SampleMatrix,
    gamma: f64,
    opts: ShatterOptions,
) -> Result<ShatterCertificate> {
    check_gamma(gamma)?;
    let m = x.m();
    if m > opts.cap || m > 63 {
        return Err(Error::CapExceeded {
            what: "labeling enumeration",
            size: m,
            cap: opts.cap.min(63),
        });
    }
    let factor = GramFactor::decompose(x.gram());
    let mut cert = ShatterCertificate {
        shattered: false,
        gamma,
        worst_labeling: None,
        worst_value: None,
        gram_condition: factor.ratio(),
        witnesses: Vec::new(),
    };
    if m > x.dim() || factor.is_singular() {
        return Ok(cert);
    }
    let a = factor.inverse() * (gamma * gamma);
    let (code, value) = max_sign_quad_form(&a);
    cert.worst_labeling = Some(labeling_from_code(code, m));
    cert.worst_value = Some(value);
    cert.shattered = value <= 1.0 + WORST_VALUE_SLACK;
    Ok(cert)
}

/// Minimum-norm separator achieving margin exactly `γ` on every point for the
/// given labeling.
pub fn witness(x: &SampleMatrix, gamma: f64, labeling: &[i8]) -> Result<DVector<f64>> {
    if labeling.len() != x.m() || labeling.iter().any(|&y| y != 1 && y != -1) {
        return invalid("labeling must be a ±1 vector with one entry per point");
    }
    let y = DVector::from_iterator(x.m(), labeling.iter().map(|&v| gamma * f64::from(v)));
    optim::min_norm_interpolator(x, &y)
}

/// Sufficient condition `λ_m(XX') ≥ m γ²` for shattering at the origin.
pub fn lambda_min_sufficient(x: &SampleMatrix, gamma: f64) -> bool {
    let m = x.m();
    m >= 1 && linalg::smallest_gram_eigenvalue(x.matrix()) >= m as f64 * gamma * gamma
}

/// Shattered-at-origin decision, answering from the eigenvalue condition when
/// it applies and falling back to enumeration otherwise.
pub fn is_shattered_at_origin(x: &SampleMatrix, gamma: f64, opts: ShatterOptions) -> Result<bool> {
    if lambda_min_sufficient(x, gamma) {
        return Ok(true);
    }
    Ok(shatter_at_origin_with(x, gamma, opts)?.shattered)
}

/// Non-exact screen for sets beyond the enumeration cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledScreen {
    pub exact: bool,
    pub lambda_min_sufficient: bool,
    pub gram_condition: f64,
    pub sampled_labelings: usize,
    /// Largest sampled `y'(XX'/γ²)⁻¹y`; `None` for a singular Gram matrix.
    pub max_sampled_value: Option<f64>,
    /// True when some sampled labeling already rules shattering out.
    pub refuted: bool,
}

/// Evaluates the eigenvalue condition and `samples` random labelings. The
/// result can refute shattering but never certifies it.
pub fn sampled_shatter_screen(
    x: &SampleMatrix,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<SampledScreen> {
    check_gamma(gamma)?;
    let factor = GramFactor::decompose(x.gram());
    let sufficient = lambda_min_sufficient(x, gamma);
    let singular = x.m() > x.dim() || factor.is_singular();
    let mut screen = SampledScreen {
        exact: false,
        lambda_min_sufficient: sufficient,
        gram_condition: factor.ratio(),
        sampled_labelings: samples,
        max_sampled_value: None,
        refuted: singular,
    };
    if singular {
        return Ok(screen);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let y = DVector::from_fn(
            x.m(),
            |_, _| if rng.random::<bool>() { gamma } else { -gamma },
        );
        best = best.max(factor.quad_form(&y));
    }
    if samples > 0 {
        screen.max_sampled_value = Some(best);
        screen.refuted = best > 1.0 + WORST_VALUE_SLACK;
    }
    Ok(screen)
}

fn offsets_feasible(x: &SampleMatrix, r: &[f64], gamma: f64, labeling: &[i8]) -> Result<bool> {
    let (m, d) = (x.m(), x.dim());
    let mut a = x.matrix().clone();
    let mut b = DVector::zeros(m);
    for i in 0..m {
        let y = f64::from(labeling[i]);
        a.row_mut(i).scale_mut(y);
        b[i] = gamma + y * r[i];
    }
    let cs = ConstraintSystem::new(a, b)?;
    debug_assert_eq!(cs.dim(), d);
    let sol = optim::solve_min_norm_ineq(&cs)?;
    Ok(sol.is_optimal() && sol.objective <= 1.0 + WORST_VALUE_SLACK)
}

/// γ-shattering with fixed offsets `r`: every labeling must admit a unit-ball
/// `w` with `y_i(⟨x_i, w⟩ − r_i) ≥ γ`.
pub fn shatter_with_offsets(
    x: &SampleMatrix,
    r: &[f64],
    gamma: f64,
    opts: ShatterOptions,
) -> Result<bool> {
    Ok(offsets_failing_labeling(x, r, gamma, opts)?.is_none())
}

/// First labeling (in enumeration order) that cannot be realised with the
/// given offsets, if any.
pub fn offsets_failing_labeling(
    x: &SampleMatrix,
    r: &[f64],
    gamma: f64,
    opts: ShatterOptions,
) -> Result<Option<Vec<i8>>> {
    check_gamma(gamma)?;
    let m = x.m();
    if r.len() != m {
        return invalid(format!("{} offsets for {m} points", r.len()));
    }
    if m > opts.cap || m > 62 {
        return Err(Error::CapExceeded {
            what: "labeling enumeration",
            size: m,
            cap: opts.cap.min(62),
        });
    }
    let to_labeling = |code: u64| -> Vec<i8> {
        (0..m)
            .map(|i| if (code >> i) & 1 == 1 { -1 } else { 1 })
            .collect()
    };
    let outcome: Vec<Result<Option<u64>>> = (0..1u64 << m)
        .into_par_iter()
        .map(|code| {
            offsets_feasible(x, r, gamma, &to_labeling(code)).map(|ok| (!ok).then_some(code))
        })
        .collect();
    for o in outcome {
        if let Some(code) = o? {
            return Ok(Some(to_labeling(code)));
        }
    }
    Ok(None)
}

/// `⌊min_k (3/2)(b_k/γ² + k + 1)⌋` over the principal-complement
/// certificates `b_k` of the set.
pub fn fat_shattering_upper_bound(points: &SampleMatrix, gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    let profile = spectral::set_limit_profile(points);
    let g2 = gamma * gamma;
    let best = profile
        .iter()
        .enumerate()
        .map(|(k, &b)| 1.5 * (b / g2 + k as f64 + 1.0))
        .fold(f64::INFINITY, f64::min);
    Ok((best + 1e-9).floor() as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FatShatteringEstimate {
    /// Size of the largest origin-shattered subset found.
    pub lower: usize,
    /// Value of the upper-bound formula.
    pub upper: usize,
    pub witness_subset: Vec<usize>,
    pub gamma: f64,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Brackets the γ-fat-shattering dimension of linear functions on the set:
/// `lower` from exhaustive origin-shattering search over subsets of at most
/// `max_subset` points, `upper` from [`fat_shattering_upper_bound`].
pub fn fat_shattering_search(
    points: &SampleMatrix,
    gamma: f64,
    max_subset: usize,
    opts: ShatterOptions,
) -> Result<FatShatteringEstimate> {
    check_gamma(gamma)?;
    if max_subset > opts.cap {
        return Err(Error::CapExceeded {
            what: "max_subset",
            size: max_subset,
            cap: opts.cap,
        });
    }
    let n = points.m();
    // Subsets larger than d have a singular Gram matrix.
    let top = max_subset.min(n).min(points.dim());
    let count: u128 = (1..=top).map(|t| binomial(n, t)).sum();
    if count > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: SUBSET_BUDGET,
        });
    }

    let mut lower = 0;
    let mut witness_subset = Vec::new();
    // Subsets of shattered sets are shattered, so the search can stop at the
    // first size with no shattered subset.
    for t in 1..=top {
        match first_shattered_subset(points, gamma, t, opts)? {
            Some(s) => {
                lower = t;
                witness_subset = s;
            }
            None => break,
        }
    }
    let upper = fat_shattering_upper_bound(points, gamma)?;
    if lower > upper {
        return Err(Error::Invariant(format!(
            "shattered subset of size {lower} exceeds the fat-shattering bound {upper}"
        )));
    }
    Ok(FatShatteringEstimate {
        lower,
        upper,
        witness_subset,
        gamma,
    })
}

fn first_shattered_subset(
    points: &SampleMatrix,
    gamma: f64,
    t: usize,
    opts: ShatterOptions,
) -> Result<Option<Vec<usize>>> {
    let n = points.m();
    let mut comb: Vec<usize> = (0..t).collect();
    let mut more = true;
    const BLOCK: usize = 1024;
    while more {
        let mut block = Vec::with_capacity(BLOCK);
        while more && block.len() < BLOCK {
            block.push(comb.clone());
            more = next_combination(&mut comb, n);
        }
        let hits: Vec<Result<bool>> = block
            .par_iter()
            .map(|idx| is_shattered_at_origin(&points.select_rows(idx), gamma, opts))
            .collect();
        for (idx, hit) in block.into_iter().zip(hits) {
            if hit? {
                return Ok(Some(idx));
            }
        }
    }
    Ok(None)
}
