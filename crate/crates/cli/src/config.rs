//! Experiment configs. Every command reads a JSON object with a
//! `schema_version` field; unknown fields are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use margin_complexity::dist::{self, DistributionSpec, Preset, PresetParams};
use margin_complexity::learner::LearnerKind;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Fields shared by every command config; `--seed`, `--workers` and `--out`
/// override them.
pub trait CommonFields {
    fn schema_version(&self) -> u32;
    fn seed(&self) -> Option<u64>;
    fn workers(&self) -> Option<usize>;
    fn out(&self) -> Option<&Path>;
    fn apply_overrides(&mut self, seed: Option<u64>, workers: Option<usize>, out: Option<PathBuf>);
}

macro_rules! command_config {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty,)* }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            pub schema_version: u32,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub seed: Option<u64>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub workers: Option<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub out: Option<PathBuf>,
            $($(#[$fmeta])* pub $field: $ty,)*
        }

        impl CommonFields for $name {
            fn schema_version(&self) -> u32 {
                self.schema_version
            }
            fn seed(&self) -> Option<u64> {
                self.seed
            }
            fn workers(&self) -> Option<usize> {
                self.workers
            }
            fn out(&self) -> Option<&Path> {
                self.out.as_deref()
            }
            fn apply_overrides(&mut self, seed: Option<u64>, workers: Option<usize>, out: Option<PathBuf>) {
                if seed.is_some() {
                    self.seed = seed;
                }
                if workers.is_some() {
                    self.workers = workers;
                }
                if out.is_some() {
                    self.out = out;
                }
            }
        }
    };
}

/// Either a named preset `{preset, d, v}` or a full distribution spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DistributionConfig {
    Preset(PresetConfig),
    Spec(DistributionSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetConfig {
    pub preset: String,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

impl<'de> Deserialize<'de> for DistributionConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let is_preset = value.get("preset").is_some();
        let parsed = if is_preset {
            serde_json::from_value(value).map(DistributionConfig::Preset)
        } else {
            serde_json::from_value(value).map(DistributionConfig::Spec)
        };
        parsed.map_err(D::Error::custom)
    }
}

impl DistributionConfig {
    pub fn build(&self) -> margin_complexity::Result<DistributionSpec> {
        match self {
            DistributionConfig::Spec(s) => Ok(s.clone()),
            DistributionConfig::Preset(p) => {
                let preset = Preset::from_str(&p.preset)?;
                dist::preset(preset, PresetParams { d: p.d, v: p.v })
            }
        }
    }
}

command_config!(
    KgammaConfig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectrum: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectrum_csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        distribution: Option<DistributionConfig>,
        gamma: f64,
        /// Also report the growth check between `γ` and `αγ`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    }
);

command_config!(
    LimitCertConfig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points_csv: Option<PathBuf>,
        /// Subspace dimension; when absent, the set's `k_γ` for `gamma`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    }
);

command_config!(
    ShatterCheckConfig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points_csv: Option<PathBuf>,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<usize>,
        /// Random labelings tried when the set exceeds the enumeration cap.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        screen_samples: Option<usize>,
        /// Attach a separating witness for each listed labeling.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        witnesses: Vec<Vec<i8>>,
        /// Write the worst labeling's margin program solution as JSON.
        #[serde(default)]
        dump_qp: bool,
    }
);

command_config!(
    FatDimConfig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points_csv: Option<PathBuf>,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_subset: Option<usize>,
    }
);

command_config!(
    EigenProbConfig {
        distribution: DistributionConfig,
        gamma: f64,
        m_grid: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
    }
);

command_config!(
    MUnderlineConfig {
        distribution: DistributionConfig,
        gamma: f64,
        m_max: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
    }
);

command_config!(
    EdgeCheckConfig {
        distribution: DistributionConfig,
        betas: Vec<f64>,
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
    }
);

command_config!(
    LearnCurveConfig {
        distribution: DistributionConfig,
        gamma: f64,
        m_grid: Vec<usize>,
        trials: usize,
        learner: LearnerKind,
    }
);

command_config!(
    SampleComplexityConfig {
        distribution: DistributionConfig,
        gamma: f64,
        m_grid: Vec<usize>,
        trials: usize,
        learner: LearnerKind,
        epsilon: f64,
    }
);

command_config!(
    ReproduceConfig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget_seconds: Option<f64>,
    }
);

impl Default for ReproduceConfig {
    fn default() -> Self {
        ReproduceConfig {
            schema_version: SCHEMA_VERSION,
            seed: None,
            workers: None,
            out: None,
            trials: None,
            budget_seconds: None,
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_and_full_spec_forms() {
        let p: DistributionConfig =
            serde_json::from_str(r#"{"preset": "bernoulli", "d": 6}"#).unwrap();
        assert_eq!(p.build().unwrap().dim(), 6);
        let full = serde_json::to_string(&dist::spiky(3).unwrap()).unwrap();
        let s: DistributionConfig = serde_json::from_str(&full).unwrap();
        assert!(matches!(s, DistributionConfig::Spec(_)));
        assert!(serde_json::from_str::<DistributionConfig>(
            r#"{"preset": "spiky", "d": 3, "w": 1}"#
        )
        .is_err());
        let bad: DistributionConfig =
            serde_json::from_str(r#"{"preset": "cauchy", "d": 3}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse::<KgammaConfig>(
            r#"{"schema_version": 1, "gamma": 1, "spectrum": [1], "gama": 2}"#
        )
        .is_err());
    }

    #[test]
    fn overrides_replace_config_values() {
        let mut c: MUnderlineConfig = parse(
            r#"{"schema_version": 1, "seed": 4, "distribution": {"preset": "spiky", "d": 5}, "gamma": 1, "m_max": 3}"#,
        )
        .unwrap();
        c.apply_overrides(None, Some(2), Some("x".into()));
        assert_eq!(
            (c.seed(), c.workers(), c.out()),
            (Some(4), Some(2), Some(Path::new("x")))
        );
        c.apply_overrides(Some(9), None, None);
        assert_eq!(c.seed(), Some(9));
    }

    fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(c: &T) {
        let text = serde_json::to_string(c).unwrap();
        assert_eq!(&parse::<T>(&text).unwrap(), c, "{text}");
    }

    proptest::proptest! {
        #[test]
        fn configs_round_trip(
            seed in proptest::option::of(proptest::num::u64::ANY),
            gamma in 1e-6f64..1e6,
            grid in proptest::collection::vec(1usize..1000, 1..6),
            d in 1usize..50,
            v in proptest::option::of(0.0f64..20.0),
            rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 3), 1..5),
        ) {
            round_trip(&KgammaConfig {
                schema_version: SCHEMA_VERSION, seed, workers: Some(2), out: Some("o".into()),
                spectrum: Some(vec![gamma, 1.0 / 3.0]), spectrum_csv: None, distribution: None,
                gamma, alpha: Some(0.5),
            });
            round_trip(&ShatterCheckConfig {
                schema_version: SCHEMA_VERSION, seed, workers: None, out: None,
                points: Some(rows), points_csv: None, gamma, cap: Some(12), screen_samples: None,
                witnesses: vec![vec![1, -1]], dump_qp: true,
            });
            let full = dist::bernoulli(d).unwrap();
            round_trip(&LearnCurveConfig {
                schema_version: SCHEMA_VERSION, seed, workers: None, out: None,
                distribution: DistributionConfig::Spec(full), gamma, m_grid: grid.clone(),
                trials: 3, learner: LearnerKind::Generative,
            });
            round_trip(&EigenProbConfig {
                schema_version: SCHEMA_VERSION, seed, workers: Some(1), out: None,
                distribution: DistributionConfig::Preset(PresetConfig { preset: "gaussian_mixture".into(), d, v }),
                gamma, m_grid: grid, trials: None,
            });
        }
    }
}
