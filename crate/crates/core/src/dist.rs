//! Independently sub-Gaussian distributions with prescribed coordinate
//! variances, an optional rotation, and a label model.
//!
//! A point is generated as `x = R (√λ_1 z_1, …, √λ_d z_d)` where each `z_i`
//! is an independent unit-variance draw from its coordinate law, so the
//! covariance is `R diag(λ) R'`.
//!
//! Relative moments `ρ = B / √E[X²]` (with `B` the sub-Gaussian moment) are a
//! fixed registry rather than runtime estimates:
//!
//! * gaussian: `E[e^{tX}] = e^{σ²t²/2}` exactly, so `ρ = 1`.
//! * rademacher: `cosh t ≤ e^{t²/2}` (compare the series term by term), so `ρ = 1`.
//! * uniform on `[-a, a]`: `sinh(ta)/(ta) ≤ e^{t²a²/6}` with variance `a²/3`, so `ρ = 1`.
//! * symmetric two-component gaussian mixture `s·v + N(0, 1)`:
//!   `cosh(tv) e^{t²/2} ≤ e^{t²(1+v²)/2}` with variance `1 + v²`, so `ρ = 1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::sample::{LabeledSample, SampleMatrix};
use crate::seeding::item_rng;
use crate::spectral::CovarianceSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Gaussian,
    Rademacher,
    UniformSymmetric,
    GaussianMixtureSymmetric,
}

impl LawKind {
    pub const ALL: [LawKind; 4] = [
        LawKind::Gaussian,
        LawKind::Rademacher,
        LawKind::UniformSymmetric,
        LawKind::GaussianMixtureSymmetric,
    ];

    pub fn relative_moment(self) -> f64 {
        match self {
            LawKind::Gaussian
            | LawKind::Rademacher
            | LawKind::UniformSymmetric
            | LawKind::GaussianMixtureSymmetric => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LawKind::Gaussian => "gaussian",
            LawKind::Rademacher => "rademacher",
            LawKind::UniformSymmetric => "uniform_symmetric",
            LawKind::GaussianMixtureSymmetric => "gaussian_mixture_symmetric",
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown coordinate law `{s}`")))
    }
}

/// Registry lookup of the relative moment by law name.
pub fn relative_moment(kind: &str) -> Result<f64> {
    Ok(kind.parse::<LawKind>()?.relative_moment())
}

/// A zero-mean, unit-variance coordinate law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoordinateLaw {
    Gaussian,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    UniformSymmetric,
    /// `(s·offset + N(0,1)) / √(1 + offset²)` with `s` a fair sign.
    GaussianMixtureSymmetric {
        offset: f64,
    },
}

impl CoordinateLaw {
    pub fn kind(&self) -> LawKind {
        match self {
            CoordinateLaw::Gaussian => LawKind::Gaussian,
            CoordinateLaw::Rademacher => LawKind::Rademacher,
            CoordinateLaw::UniformSymmetric => LawKind::UniformSymmetric,
            CoordinateLaw::GaussianMixtureSymmetric { .. } => LawKind::GaussianMixtureSymmetric,
        }
    }

    pub fn relative_moment(&self) -> f64 {
        self.kind().relative_moment()
    }

    fn validate(&self) -> Result<()> {
        if let CoordinateLaw::GaussianMixtureSymmetric { offset } = self {
            if !offset.is_finite() {
                return invalid("mixture offset must be finite");
            }
        }
        Ok(())
    }

    /// Unit-variance draw and, for the mixture, the latent component sign.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, i8) {
        match *self {
            CoordinateLaw::Gaussian => (rng.sample(StandardNormal), 1),
            CoordinateLaw::Rademacher => {
                let s = if rng.random::<bool>() { 1 } else { -1 };
                (f64::from(s), s)
            }
            CoordinateLaw::UniformSymmetric => {
                let a = 3f64.sqrt();
                (rng.random_range(-a..a), 1)
            }
            CoordinateLaw::GaussianMixtureSymmetric { offset } => {
                let s: i8 = if rng.random::<bool>() { 1 } else { -1 };
                let z: f64 = rng.sample(StandardNormal);
                (
                    (f64::from(s) * offset + z) / (1.0 + offset * offset).sqrt(),
                    s,
                )
            }
        }
    }
}

/// Conditional label law `D_{Y|X}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LabelModel {
    /// `y = sign⟨w*, x⟩` with `sign(0) = +1`.
    Halfspace { w_star: Vec<f64> },
    /// `y = +1` with probability `p`, independent of `x`.
    Coin { p: f64 },
    /// Halfspace label flipped with probability `flip`.
    HalfspaceWithFlip { w_star: Vec<f64>, flip: f64 },
    /// Latent component sign of a mixture coordinate (0-based index).
    MixtureComponent { coordinate: usize },
}

impl LabelModel {
    /// Halfspace along coordinate axis `axis` in dimension `d`.
    pub fn axis(d: usize, axis: usize) -> Self {
        let mut w = vec![0.0; d];
        w[axis] = 1.0;
        LabelModel::Halfspace { w_star: w }
    }
}

fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    laws: Vec<CoordinateLaw>,
    variances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<Vec<Vec<f64>>>,
    label_model: LabelModel,
}

/// An independently sub-Gaussian distribution with a label model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec {
    laws: Vec<CoordinateLaw>,
    variances: Vec<f64>,
    rotation: Option<DMatrix<f64>>,
    label_model: LabelModel,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let d = raw.variances.len();
        let rotation = match raw.rotation {
            None => None,
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return invalid(format!("rotation must be {d} x {d}"));
                }
                Some(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
            }
        };
        DistributionSpec::new(raw.laws, raw.variances, rotation, raw.label_model)
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(s: DistributionSpec) -> Self {
        RawSpec {
            laws: s.laws,
            variances: s.variances,
            rotation: s.rotation.map(|r| {
                r.row_iter()
                    .map(|row| row.iter().copied().collect())
                    .collect()
            }),
            label_model: s.label_model,
        }
    }
}

impl DistributionSpec {
    pub fn new(
        laws: Vec<CoordinateLaw>,
        variances: Vec<f64>,
        rotation: Option<DMatrix<f64>>,
        label_model: LabelModel,
    ) -> Result<Self> {
        let d = variances.len();
        if d == 0 {
            return invalid("distribution needs at least one coordinate");
        }
        if laws.len() != d {
            return invalid(format!("{} laws for {d} variances", laws.len()));
        }
        for law in &laws {
            law.validate()?;
        }
        if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("variances must be finite and non-negative");
        }
        if let Some(r) = &rotation {
            if r.shape() != (d, d) {
                return invalid(format!("rotation must be {d} x {d}"));
            }
            let err = (r.transpose() * r - DMatrix::identity(d, d)).amax();
            if err.is_nan() || err > 1e-8 {
                return invalid(format!(
                    "rotation is not orthogonal (max deviation {err:e})"
                ));
            }
        }
        match &label_model {
            LabelModel::Halfspace { w_star } | LabelModel::HalfspaceWithFlip { w_star, .. } => {
                if w_star.len() != d {
                    return invalid(format!("w_star has length {} but d = {d}", w_star.len()));
                }
                let n: f64 = w_star.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n.is_nan() || (n - 1.0).abs() > 1e-6 {
                    return invalid(format!("w_star must be a unit vector (norm {n})"));
                }
            }
            LabelModel::Coin { .. } => {}
            LabelModel::MixtureComponent { coordinate } => {
                if !matches!(
                    laws.get(*coordinate),
                    Some(CoordinateLaw::GaussianMixtureSymmetric { .. })
                ) {
                    return invalid(
                        "mixture_component label needs a mixture law at that coordinate",
                    );
                }
            }
        }
        if let LabelModel::Coin { p } | LabelModel::HalfspaceWithFlip { flip: p, .. } = &label_model
        {
            if !(0.0..=1.0).contains(p) {
                return invalid("probabilities must lie in [0, 1]");
            }
        }
        Ok(DistributionSpec {
            laws,
            variances,
            rotation,
            label_model,
        })
    }

    /// Every coordinate drawn from `law` with variance `variance`.
    pub fn iid(
        law: CoordinateLaw,
        d: usize,
        variance: f64,
        label_model: LabelModel,
    ) -> Result<Self> {
        Self::new(vec![law; d], vec![variance; d], None, label_model)
    }

    pub fn dim(&self) -> usize {
        self.variances.len()
    }

    pub fn laws(&self) -> &[CoordinateLaw] {
        &self.laws
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        self.rotation.as_ref()
    }

    pub fn label_model(&self) -> &LabelModel {
        &self.label_model
    }

    pub fn with_label_model(mut self, label_model: LabelModel) -> Result<Self> {
        self.label_model = label_model;
        Self::new(self.laws, self.variances, self.rotation, self.label_model)
    }

    /// Population covariance `R diag(λ) R'`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let diag = DMatrix::from_diagonal(&DVector::from_column_slice(&self.variances));
        match &self.rotation {
            Some(r) => r * diag * r.transpose(),
            None => diag,
        }
    }

    /// Covariance eigenvalues: the variances sorted descending.
    pub fn spectrum(&self) -> CovarianceSpectrum {
        let mut v = self.variances.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        CovarianceSpectrum::new(v).expect("variances validated at construction")
    }

    /// Largest relative moment among the coordinate laws.
    pub fn relative_moment(&self) -> f64 {
        self.laws
            .iter()
            .map(CoordinateLaw::relative_moment)
            .fold(0.0, f64::max)
    }

    /// `(law, variance)` when coordinates are i.i.d. in the standard basis.
    pub fn iid_law(&self) -> Option<(CoordinateLaw, f64)> {
        if self.rotation.is_some() {
            return None;
        }
        let (law, var) = (self.laws[0], self.variances[0]);
        let same = self.laws.iter().all(|l| *l == law) && self.variances.iter().all(|v| *v == var);
        same.then_some((law, var))
    }

    /// Short hex digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let hash = Sha256::digest(json.as_bytes());
        hex::encode(&hash[..8])
    }

    fn draw_point(&self, seed: u64, index: usize, out: &mut [f64]) -> i8 {
        let mut rng = item_rng(seed, index as u64);
        let mut latent = vec![1i8; self.dim()];
        for (i, law) in self.laws.iter().enumerate() {
            let (z, s) = law.draw(&mut rng);
            out[i] = self.variances[i].sqrt() * z;
            latent[i] = s;
        }
        if let Some(r) = &self.rotation {
            let v = r * DVector::from_column_slice(out);
            out.copy_from_slice(v.as_slice());
        }
        let dot = |w: &[f64]| -> f64 { w.iter().zip(out.iter()).map(|(a, b)| a * b).sum() };
        match &self.label_model {
            LabelModel::Halfspace { w_star } => sign(dot(w_star)),
            LabelModel::Coin { p } => {
                if rng.random::<f64>() < *p {
                    1
                } else {
                    -1
                }
            }
            LabelModel::HalfspaceWithFlip { w_star, flip } => {
                let y = sign(dot(w_star));
                if rng.random::<f64>() < *flip {
                    -y
                } else {
                    y
                }
            }
            LabelModel::MixtureComponent { coordinate } => latent[*coordinate],
        }
    }

    /// Label a Bayes-optimal predictor would assign to `x`; the less likely
    /// label has conditional probability at most 1/2.
    pub fn designated_label(&self, x: &[f64]) -> i8 {
        let dot = |w: &[f64]| -> f64 { w.iter().zip(x).map(|(a, b)| a * b).sum() };
        match &self.label_model {
            LabelModel::Halfspace { w_star } => sign(dot(w_star)),
            LabelModel::HalfspaceWithFlip { w_star, flip } => {
                let y = sign(dot(w_star));
                if *flip > 0.5 {
                    -y
                } else {
                    y
                }
            }
            LabelModel::Coin { p } => {
                if *p >= 0.5 {
                    1
                } else {
                    -1
                }
            }
            LabelModel::MixtureComponent { coordinate } => {
                let axis = self.axis_direction(*coordinate);
                sign(axis.iter().zip(x).map(|(a, b)| a * b).sum())
            }
        }
    }

    fn axis_direction(&self, coordinate: usize) -> Vec<f64> {
        match &self.rotation {
            Some(r) => r.column(coordinate).iter().copied().collect(),
            None => {
                let mut e = vec![0.0; self.dim()];
                e[coordinate] = 1.0;
                e
            }
        }
    }

    /// Unit direction of the label model's reference separator, when it has
    /// one.
    pub fn reference_direction(&self) -> Option<DVector<f64>> {
        match &self.label_model {
            LabelModel::Halfspace { w_star } | LabelModel::HalfspaceWithFlip { w_star, .. } => {
                Some(DVector::from_column_slice(w_star))
            }
            LabelModel::MixtureComponent { coordinate } => {
                Some(DVector::from_vec(self.axis_direction(*coordinate)))
            }
            LabelModel::Coin { .. } => None,
        }
    }
}

/// `m` i.i.d. labeled draws. Point `i` depends only on `(seed, i)`, so the
/// first `m` points of a larger sample equal the `m`-point sample.
pub fn sample(spec: &DistributionSpec, m: usize, seed: u64) -> Result<LabeledSample> {
    if m == 0 {
        return invalid("sample size must be positive");
    }
    let d = spec.dim();
    let mut data = vec![0.0; m * d];
    let mut labels = Vec::with_capacity(m);
    let mut row = vec![0.0; d];
    for i in 0..m {
        labels.push(spec.draw_point(seed, i, &mut row));
        for j in 0..d {
            // column-major storage
            data[j * m + i] = row[j];
        }
    }
    let points = SampleMatrix::new(DMatrix::from_vec(m, d, data))?;
    LabeledSample::new(points, labels)
}

/// Points only; identical to the points of [`sample`] for the same seed.
pub fn sample_points(spec: &DistributionSpec, m: usize, seed: u64) -> Result<SampleMatrix> {
    Ok(sample(spec, m, seed)?.points().clone())
}

/// Parameters for the preset distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    pub d: usize,
    #[serde(default)]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Spiky,
    Bernoulli,
    GaussianMixture,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spiky" => Ok(Preset::Spiky),
            "bernoulli" => Ok(Preset::Bernoulli),
            "gaussian_mixture" => Ok(Preset::GaussianMixture),
            _ => invalid(format!("unknown preset `{s}`")),
        }
    }
}

pub fn preset(name: Preset, params: PresetParams) -> Result<DistributionSpec> {
    match name {
        Preset::Spiky => spiky(params.d),
        Preset::Bernoulli => bernoulli(params.d),
        Preset::GaussianMixture => {
            let Some(v) = params.v else {
                return invalid("gaussian_mixture needs the offset `v`");
            };
            gaussian_mixture(params.d, v)
        }
    }
}

/// Independent gaussian coordinates with variance 1000 on the first axis and
/// 0.001 on the remaining `d - 1`; labels by the first coordinate's sign.
pub fn spiky(d: usize) -> Result<DistributionSpec> {
    if d < 2 {
        return invalid("spiky needs d >= 2");
    }
    let mut var = vec![0.001; d];
    var[0] = 1000.0;
    DistributionSpec::new(
        vec![CoordinateLaw::Gaussian; d],
        var,
        None,
        LabelModel::axis(d, 0),
    )
}

/// Independent ±1 coordinates with label `y = x[1]`.
pub fn bernoulli(d: usize) -> Result<DistributionSpec> {
    if d < 1 {
        return invalid("bernoulli needs d >= 1");
    }
    DistributionSpec::iid(CoordinateLaw::Rademacher, d, 1.0, LabelModel::axis(d, 0))
}

/// Two unit-variance spherical gaussians centred at `±v e_1`, label = class.
/// The first coordinate has variance `1 + v²`.
pub fn gaussian_mixture(d: usize, v: f64) -> Result<DistributionSpec> {
    if d < 1 {
        return invalid("gaussian_mixture needs d >= 1");
    }
    if !(v.is_finite() && v > 0.0) {
        return invalid("mixture offset v must be positive");
    }
    let mut laws = vec![CoordinateLaw::Gaussian; d];
    laws[0] = CoordinateLaw::GaussianMixtureSymmetric { offset: v };
    let mut var = vec![1.0; d];
    var[0] = 1.0 + v * v;
    DistributionSpec::new(
        laws,
        var,
        None,
        LabelModel::MixtureComponent { coordinate: 0 },
    )
}

/// Isotropic gaussian with common variance and labels along `e_1`.
pub fn isotropic_gaussian(d: usize, variance: f64) -> Result<DistributionSpec> {
    DistributionSpec::iid(CoordinateLaw::Gaussian, d, variance, LabelModel::axis(d, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::k_gamma;

    #[test]
    fn zero_variance_gives_origin() {
        let s = DistributionSpec::iid(CoordinateLaw::Gaussian, 3, 0.0, LabelModel::Coin { p: 0.5 })
            .unwrap();
        let smp = sample(&s, 5, 1).unwrap();
        assert!(smp.points().matrix().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn per_coordinate_variances() {
        let s = DistributionSpec::new(
            vec![CoordinateLaw::Gaussian; 2],
            vec![4.0, 1.0],
            None,
            LabelModel::axis(2, 0),
        )
        .unwrap();
        let x = sample_points(&s, 10_000, 42).unwrap();
        for (j, target) in [4.0, 1.0].into_iter().enumerate() {
            let col = x.matrix().column(j);
            let var = col.iter().map(|v| v * v).sum::<f64>() / 10_000.0;
            assert!((var / target - 1.0).abs() < 0.05, "coord {j}: {var}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_nested() {
        let s = gaussian_mixture(6, 2.0).unwrap();
        let a = sample(&s, 40, 9).unwrap();
        assert_eq!(a, sample(&s, 40, 9).unwrap());
        let b = sample(&s, 25, 9).unwrap();
        assert_eq!(a.points().prefix(25), *b.points());
        assert_eq!(&a.labels()[..25], b.labels());
        assert_ne!(a, sample(&s, 40, 10).unwrap());
    }

    #[test]
    fn relative_moment_registry() {
        assert_eq!(relative_moment("gaussian").unwrap(), 1.0);
        assert_eq!(relative_moment("rademacher").unwrap(), 1.0);
        assert_eq!(relative_moment("uniform_symmetric").unwrap(), 1.0);
        assert!(relative_moment("cauchy").is_err());
    }

    /// The closed-form MGFs stay below `exp(ρ² σ² t² / 2)` across a t grid.
    #[test]
    fn mgf_ratio_closed_forms() {
        for i in 0..=400 {
            let t = -10.0 + 0.05 * i as f64;
            let bound = (t * t / 2.0).exp();
            // rademacher
            assert!(t.cosh() <= bound * (1.0 + 1e-12));
            // uniform on [-√3, √3], variance 1
            let a = 3f64.sqrt();
            let u = if t == 0.0 {
                1.0
            } else {
                (t * a).sinh() / (t * a)
            };
            assert!(u <= bound * (1.0 + 1e-12));
            // gaussian equality
            assert!((((t * t) / 2.0).exp() / bound - 1.0).abs() < 1e-12);
            // mixture with offset v, unscaled: variance 1 + v²
            for v in [0.5, 2.0, 4.0] {
                let lhs = (t * v).cosh() * (t * t / 2.0).exp();
                let rhs = (t * t * (1.0 + v * v) / 2.0).exp();
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn presets_have_closed_form_adapted_dimension() {
        let s = spiky(1001).unwrap();
        assert_eq!(s.spectrum().eigenvalues()[0], 1000.0);
        assert_eq!(s.spectrum().eigenvalues()[1000], 0.001);
        assert_eq!(k_gamma(&s.spectrum(), 1.0).unwrap().k, 1);

        let b = bernoulli(10).unwrap();
        assert_eq!(k_gamma(&b.spectrum(), 1.0).unwrap().k, 5);
        let smp = sample(&b, 50, 3).unwrap();
        for i in 0..50 {
            assert_eq!(f64::from(smp.labels()[i]), smp.points().matrix()[(i, 0)]);
        }

        let g = gaussian_mixture(100, 4.0).unwrap();
        assert_eq!(k_gamma(&g.spectrum(), 2.0).unwrap().k, 20);
        assert!(preset(Preset::GaussianMixture, PresetParams { d: 3, v: None }).is_err());
        assert!(spiky(1).is_err());
    }

    #[test]
    fn json_schema_round_trip_and_validation() {
        let s = gaussian_mixture(3, 2.0).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["laws"][0]["kind"], "gaussian_mixture_symmetric");
        assert_eq!(json["label_model"]["kind"], "mixture_component");
        assert!(json.get("rotation").is_none());
        let back: DistributionSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);

        let text = r#"{"laws":[{"kind":"gaussian"},{"kind":"gaussian"}],"variances":[1,2],
            "rotation":[[0,1],[1,0]],"label_model":{"kind":"coin","p":0.5}}"#;
        let s: DistributionSpec = serde_json::from_str(text).unwrap();
        assert_eq!(s.covariance()[(0, 0)], 2.0);

        let bad_rot = r#"{"laws":[{"kind":"gaussian"}],"variances":[1],"rotation":[[2]],"label_model":{"kind":"coin","p":0.5}}"#;
        assert!(serde_json::from_str::<DistributionSpec>(bad_rot).is_err());
        let typo =
            r#"{"laws":[{"kind":"gaussian"}],"variances":[1],"label":{"kind":"coin","p":0.5}}"#;
        assert!(serde_json::from_str::<DistributionSpec>(typo).is_err());
        let not_unit = r#"{"laws":[{"kind":"gaussian"}],"variances":[1],"label_model":{"kind":"halfspace","w_star":[2]}}"#;
        assert!(serde_json::from_str::<DistributionSpec>(not_unit).is_err());
    }

    #[test]
    fn halfspace_sign_of_zero_is_positive() {
        let s =
            DistributionSpec::iid(CoordinateLaw::Gaussian, 2, 0.0, LabelModel::axis(2, 1)).unwrap();
        assert!(sample(&s, 3, 0).unwrap().labels().iter().all(|&y| y == 1));
    }

    #[test]
    fn iid_detection() {
        assert!(bernoulli(4).unwrap().iid_law().is_some());
        assert!(gaussian_mixture(4, 1.0).unwrap().iid_law().is_none());
        assert!(spiky(4).unwrap().iid_law().is_none());
    }
}
