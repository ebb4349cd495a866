//! Registered model names and their construction from config entries.

use std::collections::BTreeMap;

use abcdic_core::coalescent::{coal_model_with, CoalModel};
use abcdic_core::params::Record;
use abcdic_core::{toy, ModelSpec, ParamDef, Transform};

use crate::config::ModelEntry;
use crate::error::{CliError, CliResult};

pub const REGISTERED: [&str; 8] = [
    "toy.gaussian",
    "toy.laplace",
    "coal.constant",
    "coal.bottleneck",
    "coal.expansion",
    "coal.isolation",
    "coal.im_asym",
    "coal.im_full",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Registered {
    Gaussian,
    Laplace,
    Coal(CoalModel),
}

impl Registered {
    pub fn lookup(name: &str) -> CliResult<Self> {
        match name {
            "toy.gaussian" => Ok(Registered::Gaussian),
            "toy.laplace" => Ok(Registered::Laplace),
            _ => CoalModel::from_label(name).map(Registered::Coal).ok_or_else(|| {
                CliError::UnknownModel {
                    name: name.to_string(),
                    registered: REGISTERED.join(", "),
                }
            }),
        }
    }

    fn default_params(self) -> Vec<ParamDef> {
        match self {
            Registered::Gaussian => toy::default_gaussian_params(),
            Registered::Laplace => toy::default_laplace_params(),
            Registered::Coal(m) => m.default_priors(),
        }
    }

    /// Parameter values used for generated data when a generator leaves
    /// them out.
    pub fn reference_values(self) -> Vec<f64> {
        match self {
            Registered::Gaussian => vec![2.0, 9.0],
            Registered::Laplace => vec![1.0],
            Registered::Coal(m) => m.truth(),
        }
    }
}

/// A model ready for simulation, with the registered name it came from.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub kind: Registered,
    pub spec: ModelSpec,
}

impl Candidate {
    pub fn label(&self) -> &str {
        self.spec.label()
    }

    /// Full parameter vector from named values, filling gaps with the
    /// reference values.
    pub fn param_values(&self, given: &BTreeMap<String, f64>) -> CliResult<Vec<f64>> {
        let names = self.spec.param_names();
        if let Some(unknown) = given.keys().find(|k| !names.contains(k)) {
            return Err(CliError::Config(format!(
                "{} has no parameter {unknown:?} (parameters: {})",
                self.label(),
                names.join(", ")
            )));
        }
        Ok(names
            .iter()
            .zip(self.kind.reference_values())
            .map(|(n, default)| given.get(n).copied().unwrap_or(default))
            .collect())
    }
}

fn override_priors(label: &str, mut params: Vec<ParamDef>, entry: &ModelEntry) -> CliResult<Vec<ParamDef>> {
    let known: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    for (name, prior) in &entry.priors {
        let p = params.iter_mut().find(|p| &p.name == name).ok_or_else(|| {
            CliError::Config(format!(
                "{label} has no parameter {name:?} (parameters: {})",
                known.join(", ")
            ))
        })?;
        p.prior = *prior;
        p.transform = match p.record {
            Record::Square => Transform::Log,
            Record::Draw => prior.natural_transform(),
        };
        p.validate().map_err(|e| CliError::Config(format!("{label}: {e}")))?;
    }
    Ok(params)
}

pub fn build_model(entry: &ModelEntry) -> CliResult<Candidate> {
    let kind = Registered::lookup(&entry.name)?;
    let label = entry.label();
    let params = override_priors(label, kind.default_params(), entry)?;
    let config_err = |msg: String| CliError::Config(format!("{label}: {msg}"));
    let spec = match kind {
        Registered::Gaussian | Registered::Laplace => {
            if entry.sample.is_some() || entry.loci.is_some() {
                return Err(config_err("sample and loci apply to coalescent models only".into()));
            }
            let n = entry.sample_size.unwrap_or(toy::SAMPLE_SIZE);
            if n < 4 {
                return Err(config_err(format!("sampleSize must be at least 4, got {n}")));
            }
            if kind == Registered::Gaussian {
                toy::gaussian_model_with(params, n)
            } else {
                toy::laplace_model_with(params, n)
            }
        }
        Registered::Coal(m) => {
            if entry.sample_size.is_some() {
                return Err(config_err("sampleSize applies to toy models only".into()));
            }
            let (default_sample, default_loci) = m.default_design();
            let sample = entry.sample.clone().unwrap_or(default_sample);
            if sample.demes() != m.demes() {
                return Err(config_err(format!(
                    "model has {} deme(s) but the sample lists {}",
                    m.demes(),
                    sample.demes()
                )));
            }
            coal_model_with(m, params, sample, entry.loci.unwrap_or(default_loci))
        }
    }
    .map_err(|e| config_err(e.to_string()))?;
    Ok(Candidate {
        name: entry.name.clone(),
        kind,
        spec: spec.with_label(label),
    })
}
