//! Experiment configuration: one JSON document with a versioned schema.
//!
//! ```json
//! {
//!   "version": 1,
//!   "models": [
//!     {"name": "toy.gaussian"},
//!     {"name": "toy.laplace", "priors": {"lambda": {"kind": "Exponential", "rate": 1}}}
//!   ],
//!   "observed": {"values": {"mean": 2.0, "sd": 3.11, "skewness": -0.78, "kurtosis": 0.14}},
//!   "table": {"perModel": 10000},
//!   "rate": 0.1,
//!   "adjust": "loclinear",
//!   "dic": {"variants": [1, 2], "n": 1000, "m": 200, "nPerDraw": 200, "aggregation": "mean"},
//!   "predictive": {"n": 1000},
//!   "modelProbs": ["count", "mnlogistic"],
//!   "rootSeed": 1
//! }
//! ```
//!
//! Observed data are either given as named values or generated:
//! `"observed": {"generate": [{"model": "coal.constant", "params": {"theta": 3}, "replicates": 100}]}`.
//! A generator names a model label from `models` (its sampling design is
//! used) or any registered model; missing parameters take the model's
//! reference values.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use abcdic_core::abc::ProbMethod;
use abcdic_core::coalescent::SampleConfig;
use abcdic_core::dic::Aggregation;
use abcdic_core::distributions::PriorSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub models: Vec<ModelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<Observed>,
    #[serde(default)]
    pub table: TableSettings,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default)]
    pub adjust: Adjust,
    #[serde(default)]
    pub dic: DicSettings,
    #[serde(default = "default_predictive")]
    pub predictive: Option<PredictiveSettings>,
    #[serde(default = "default_prob_methods")]
    pub model_probs: Vec<ProbMethod>,
    #[serde(default)]
    pub root_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelEntry {
    /// Registered model name.
    pub name: String,
    /// Label in tables and reports; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub priors: BTreeMap<String, PriorSpec>,
    /// Observations per data set (toy models).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    /// Haplotypes per deme (coalescent models).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loci: Option<usize>,
}

impl ModelEntry {
    pub fn named(name: impl Into<String>) -> Self {
        ModelEntry {
            name: name.into(),
            label: None,
            priors: BTreeMap::new(),
            sample_size: None,
            sample: None,
            loci: None,
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum Observed {
    Values(BTreeMap<String, f64>),
    Generate(Vec<Generator>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Generator {
    pub model: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "one")]
    pub replicates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TableSettings {
    #[serde(default = "default_per_model")]
    pub per_model: usize,
    /// Read the table from this CSV (with its `.meta.json` sidecar) instead
    /// of simulating it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Include the table in the output bundle.
    #[serde(default)]
    pub save: bool,
}

impl Default for TableSettings {
    fn default() -> Self {
        TableSettings {
            per_model: default_per_model(),
            path: None,
            save: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjust {
    None,
    #[default]
    Loclinear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DicSettings {
    #[serde(default = "default_variants")]
    pub variants: Vec<u8>,
    /// Posterior predictive simulations for variant 1.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Posterior draws for variant 2.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Simulations per posterior draw for variant 2.
    #[serde(default = "default_m")]
    pub n_per_draw: usize,
    #[serde(default)]
    pub aggregation: Aggregation,
    /// Aggregation override for replicates generated by the given model.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aggregation_by_truth: BTreeMap<String, Aggregation>,
}

impl Default for DicSettings {
    fn default() -> Self {
        DicSettings {
            variants: default_variants(),
            n: default_n(),
            m: default_m(),
            n_per_draw: default_m(),
            aggregation: Aggregation::Mean,
            aggregation_by_truth: BTreeMap::new(),
        }
    }
}

impl DicSettings {
    pub fn aggregation_for(&self, truth: Option<&str>) -> Aggregation {
        truth
            .and_then(|t| self.aggregation_by_truth.get(t))
            .copied()
            .unwrap_or(self.aggregation)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PredictiveSettings {
    #[serde(default = "default_n")]
    pub n: usize,
}

fn one() -> usize {
    1
}
fn default_rate() -> f64 {
    0.1
}
fn default_per_model() -> usize {
    10_000
}
fn default_variants() -> Vec<u8> {
    vec![1, 2]
}
fn default_n() -> usize {
    1000
}
fn default_m() -> usize {
    200
}
fn default_predictive() -> Option<PredictiveSettings> {
    Some(PredictiveSettings { n: default_n() })
}
fn default_prob_methods() -> Vec<ProbMethod> {
    vec![ProbMethod::Count, ProbMethod::Mnlogistic]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Schema checks that do not need the model registry.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            ));
        }
        if self.models.is_empty() {
            return bad("at least one model is required".into());
        }
        let mut labels = BTreeSet::new();
        for m in &self.models {
            if !labels.insert(m.label()) {
                return bad(format!("duplicate model label {:?}", m.label()));
            }
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return bad(format!("rate must be in (0, 1], got {}", self.rate));
        }
        if self.table.per_model == 0 {
            return bad("table.perModel must be at least 1".into());
        }
        let d = &self.dic;
        if d.variants.iter().any(|v| !matches!(v, 1 | 2)) {
            return bad(format!("dic.variants must be drawn from [1, 2], got {:?}", d.variants));
        }
        if d.n == 0 || d.m == 0 || d.n_per_draw == 0 {
            return bad("dic.n, dic.m and dic.nPerDraw must be at least 1".into());
        }
        if let Some(p) = &self.predictive {
            if p.n == 0 {
                return bad("predictive.n must be at least 1".into());
            }
        }
        match &self.observed {
            Some(Observed::Generate(gens)) => {
                if gens.is_empty() {
                    return bad("observed.generate is empty".into());
                }
                if let Some(g) = gens.iter().find(|g| g.replicates == 0) {
                    return bad(format!("generator {}: replicates must be at least 1", g.model));
                }
            }
            Some(Observed::Values(v)) if v.is_empty() => {
                return bad("observed.values is empty".into());
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
