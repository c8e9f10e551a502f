//! γ-adapted dimension of covariance spectra and `(b, k)`-limit
//! certificates for finite point sets.
//!
//! For a spectrum `λ_1 ≥ … ≥ λ_d` the adapted dimension at margin `γ` is the
//! smallest `k` whose tail `Σ_{i>k} λ_i` is at most `γ² k`. The tail itself is
//! the smallest `b` for which the distribution is `(b, k)`-limited.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sample::SampleMatrix;

/// Relative slack on the tail inequality, scaled by `max(1, trace)`.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Eigenvalues of a covariance matrix, non-negative and sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CovarianceSpectrum {
    eigenvalues: Vec<f64>,
}

impl CovarianceSpectrum {
    /// Validates a descending, non-negative spectrum. Unsorted input is an
    /// error rather than being sorted silently.
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return invalid("spectrum must have at least one eigenvalue");
        }
        for (i, &l) in eigenvalues.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return invalid(format!("eigenvalue {i} is {l}; must be finite and >= 0"));
            }
        }
        if let Some(i) = eigenvalues.windows(2).position(|w| w[0] < w[1]) {
            return invalid(format!(
                "spectrum not sorted descending at index {}: {} < {}",
                i + 1,
                eigenvalues[i],
                eigenvalues[i + 1]
            ));
        }
        Ok(CovarianceSpectrum { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `trace(Σ) = E‖X‖²`.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().rev().sum()
    }

    /// `tails[k] = Σ_{i>k} λ_i` for `k = 0..=d`, accumulated from the smallest
    /// eigenvalue upward.
    pub fn tail_sums(&self) -> Vec<f64> {
        let d = self.dim();
        let mut tails = vec![0.0; d + 1];
        for k in (0..d).rev() {
            tails[k] = tails[k + 1] + self.eigenvalues[k];
        }
        tails
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 1 || &headers[0] != "eigenvalue" {
            return invalid("spectrum CSV must have the single header `eigenvalue`");
        }
        let mut vals = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let v: f64 = rec[0]
                .parse()
                .map_err(|e| Error::Invalid(format!("line {}: {e}", line + 2)))?;
            vals.push(v);
        }
        Self::new(vals)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["eigenvalue"])?;
        for v in &self.eigenvalues {
            w.write_record([v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for CovarianceSpectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CovarianceSpectrum> for Vec<f64> {
    fn from(s: CovarianceSpectrum) -> Self {
        s.eigenvalues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptedDimResult {
    pub k: usize,
    pub gamma: f64,
    /// `Σ_{i>k} λ_i` at the returned `k`.
    pub tail_sum: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return invalid(format!("gamma must be positive and finite, got {gamma}"));
    }
    Ok(())
}

/// Smallest `k` with `Σ_{i>k} λ_i ≤ γ² k`.
pub fn k_gamma(spectrum: &CovarianceSpectrum, gamma: f64) -> Result<AdaptedDimResult> {
    check_gamma(gamma)?;
    let tails = spectrum.tail_sums();
    let slack = TAIL_TOLERANCE * tails[0].max(1.0);
    let g2 = gamma * gamma;
    let k = (0..=spectrum.dim())
        .find(|&k| tails[k] <= g2 * k as f64 + slack)
        .expect("k = d always satisfies the tail condition");
    Ok(AdaptedDimResult {
        k,
        gamma,
        tail_sum: tails[k],
    })
}

/// Minimal `b` for which the distribution is `(b, k)`-limited: the sum of
/// the `d - k` smallest eigenvalues.
pub fn b_for_k(spectrum: &CovarianceSpectrum, k: usize) -> Result<f64> {
    if k > spectrum.dim() {
        return invalid(format!("k = {k} exceeds dimension {}", spectrum.dim()));
    }
    Ok(spectrum.tail_sums()[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub k_gamma: usize,
    pub k_alphagamma: usize,
    /// Whether `k_γ ≤ k_{αγ} ≤ 2 k_γ / α² + 1`. Always true for a correct
    /// implementation.
    pub holds: bool,
}

/// Evaluates both adapted dimensions and the sandwich relating them.
pub fn check_growth_bound(
    spectrum: &CovarianceSpectrum,
    gamma: f64,
    alpha: f64,
) -> Result<GrowthReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let kg = k_gamma(spectrum, gamma)?.k;
    let kag = k_gamma(spectrum, alpha * gamma)?.k;
    let upper = 2.0 * kg as f64 / (alpha * alpha) + 1.0;
    Ok(GrowthReport {
        k_gamma: kg,
        k_alphagamma: kag,
        holds: kg <= kag && kag as f64 <= upper,
    })
}

/// Witness that a point set lies in `{x : ‖x'P‖² ≤ b}` for the projection `P`
/// onto a `(d - k)`-dimensional subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCertificate {
    pub b: f64,
    pub k: usize,
    /// Orthonormal rows spanning the subspace, `(d - k) × d`.
    pub subspace_basis: Vec<Vec<f64>>,
}

impl LimitCertificate {
    /// `‖x'P‖²` for the certificate's projection.
    pub fn projected_sq_norm(&self, x: &[f64]) -> f64 {
        self.subspace_basis
            .iter()
            .map(|v| {
                let c: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum();
                c * c
            })
            .sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.projected_sq_norm(x) <= self.b
    }

    /// Largest deviation of `B B'` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.subspace_basis.iter().enumerate() {
            for (j, v) in self.subspace_basis.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Right singular directions of the point matrix, ordered by decreasing
/// singular value (ties keep eigensolver order).
fn principal_directions(points: &SampleMatrix) -> Vec<DVector<f64>> {
    let x = points.matrix();
    let cov = x.transpose() * x;
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order
        .into_iter()
        .map(|j| eig.eigenvectors.column(j).into_owned())
        .collect()
}

/// Certifies `(b, k)`-limitedness of a point set using the orthogonal
/// complement of its top-`k` principal subspace. The returned `b` is valid
/// but not necessarily the smallest over all subspaces.
pub fn set_limit_certificate(points: &SampleMatrix, k: usize) -> Result<LimitCertificate> {
    let d = points.dim();
    if k > d {
        return invalid(format!("k = {k} exceeds dimension {d}"));
    }
    let dirs = principal_directions(points);
    let mut cert = LimitCertificate {
        b: 0.0,
        k,
        subspace_basis: dirs[k..]
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
    };
    cert.b = (0..points.m())
        .map(|i| {
            let row: Vec<f64> = points.row(i).iter().copied().collect();
            cert.projected_sq_norm(&row)
        })
        .fold(0.0, f64::max);
    Ok(cert)
}

/// `b_k` of the principal-complement certificate for every `k = 0..=d`.
pub fn set_limit_profile(points: &SampleMatrix) -> Vec<f64> {
    let d = points.dim();
    let dirs = principal_directions(points);
    let mut b = vec![0.0_f64; d + 1];
    for i in 0..points.m() {
        let x = points.row_vec(i);
        let mut tail = 0.0;
        for k in (0..d).rev() {
            let c = dirs[k].dot(&x);
            tail += c * c;
            b[k] = b[k].max(tail);
        }
    }
    b
}

/// Adapted dimension of a finite set: smallest `k` whose principal-complement
/// certificate has `b_k ≤ γ² k`. An upper bound on the true set quantity.
pub fn set_k_gamma(points: &SampleMatrix, gamma: f64) -> Result<AdaptedDimResult> {
    check_gamma(gamma)?;
    let b = set_limit_profile(points);
    let slack = TAIL_TOLERANCE * b[0].max(1.0);
    let g2 = gamma * gamma;
    let k = (0..b.len())
        .find(|&k| b[k] <= g2 * k as f64 + slack)
        .expect("b_d = 0");
    Ok(AdaptedDimResult {
        k,
        gamma,
        tail_sum: b[k],
    })
}
