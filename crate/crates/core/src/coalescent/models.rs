use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coalescent::demography::Demography;
use crate::coalescent::genealogy::{simulate_genealogy, SampleConfig};
use crate::coalescent::locus::site_counts;
use crate::coalescent::stats::{popgen_names, stats_from_counts, summarize, AllAbsent, PopGenStats, TajimaConstants};
use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Simulator};
use crate::params::ParamDef;
use crate::rng::{child_seed, rng_from_seed};
use crate::summary::{Names, SummaryVector};

/// The built-in population-genetic models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoalModel {
    /// `(theta)`
    Constant,
    /// `(theta, t, severity)` with `x = 1 / severity`.
    Bottleneck,
    /// `(theta, alpha)`
    Expansion,
    /// `(theta, nu1, nu2, t_split)`
    Isolation,
    /// `(theta, nu1, nu2, t_split, m1)`
    ImAsym,
    /// `(theta, nu1, nu2, t_split, m1, m2)`
    ImFull,
}

impl CoalModel {
    pub const ALL: [CoalModel; 6] = [
        CoalModel::Constant,
        CoalModel::Bottleneck,
        CoalModel::Expansion,
        CoalModel::Isolation,
        CoalModel::ImAsym,
        CoalModel::ImFull,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CoalModel::Constant => "coal.constant",
            CoalModel::Bottleneck => "coal.bottleneck",
            CoalModel::Expansion => "coal.expansion",
            CoalModel::Isolation => "coal.isolation",
            CoalModel::ImAsym => "coal.im_asym",
            CoalModel::ImFull => "coal.im_full",
        }
    }

    pub fn from_label(label: &str) -> Option<CoalModel> {
        CoalModel::ALL.into_iter().find(|m| m.label() == label)
    }

    pub fn demes(self) -> usize {
        match self {
            CoalModel::Constant | CoalModel::Bottleneck | CoalModel::Expansion => 1,
            _ => 2,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            CoalModel::Constant => &["theta"],
            CoalModel::Bottleneck => &["theta", "t", "severity"],
            CoalModel::Expansion => &["theta", "alpha"],
            CoalModel::Isolation => &["theta", "nu1", "nu2", "t_split"],
            CoalModel::ImAsym => &["theta", "nu1", "nu2", "t_split", "m1"],
            CoalModel::ImFull => &["theta", "nu1", "nu2", "t_split", "m1", "m2"],
        }
    }

    pub fn default_priors(self) -> Vec<ParamDef> {
        let u = |a, b| PriorSpec::Uniform { a, b };
        let log10u = PriorSpec::Log10Uniform { a: 0.0, b: 1.5 };
        let prior = |name: &str| match name {
            "theta" => u(0.0, 15.0),
            "t" | "t_split" => u(0.0, 1.0),
            "severity" | "alpha" => log10u,
            "nu1" | "nu2" => u(0.0, 3.0),
            "m1" | "m2" => u(0.0, 100.0),
            _ => unreachable!(),
        };
        self.param_names()
            .iter()
            .map(|&n| ParamDef::new(n, prior(n)))
            .collect()
    }

    /// Parameter values used to generate pseudo-observed data.
    pub fn truth(self) -> Vec<f64> {
        match self {
            CoalModel::Constant => vec![3.0],
            CoalModel::Bottleneck => vec![3.0, 0.2, 4.0],
            CoalModel::Expansion => vec![3.0, 2.0],
            CoalModel::Isolation => vec![4.0, 1.0, 1.0, 0.7],
            CoalModel::ImAsym => vec![4.0, 1.0, 1.0, 0.7, 40.0],
            CoalModel::ImFull => vec![4.0, 1.0, 1.0, 0.7, 40.0, 30.0],
        }
    }

    /// 100 haplotypes at 20 loci, or 100 + 100 haplotypes at 100 loci.
    pub fn default_design(self) -> (SampleConfig, usize) {
        if self.demes() == 1 {
            (SampleConfig::single(100).expect("valid"), 20)
        } else {
            (SampleConfig::two(100, 100).expect("valid"), 100)
        }
    }

    /// `(theta, demography)` for a parameter vector in the model's order.
    pub fn demography(self, p: &[f64]) -> Result<(f64, Demography)> {
        if p.len() != self.param_names().len() {
            return Err(Error::InvalidParam(format!(
                "{} takes {} parameters, got {}",
                self.label(),
                self.param_names().len(),
                p.len()
            )));
        }
        let d = match self {
            CoalModel::Constant => Demography::Constant,
            CoalModel::Bottleneck => Demography::Bottleneck { t: p[1], x: 1.0 / p[2] },
            CoalModel::Expansion => Demography::ExponentialGrowth { alpha: p[1] },
            CoalModel::Isolation => Demography::Isolation { t_split: p[3], nu1: p[1], nu2: p[2] },
            CoalModel::ImAsym => Demography::IsolationMigration {
                t_split: p[3],
                nu1: p[1],
                nu2: p[2],
                m1: p[4],
                m2: 0.0,
            },
            CoalModel::ImFull => Demography::IsolationMigration {
                t_split: p[3],
                nu1: p[1],
                nu2: p[2],
                m1: p[4],
                m2: p[5],
            },
        };
        Ok((p[0], d))
    }
}

/// Multi-locus coalescent simulator for one of the built-in models.
///
/// Locus `l` of a simulation with seed `s` uses the genealogy seed
/// `child(child(s, l), 0)` and the mutation seed `child(child(s, l), 1)`, so
/// the genealogies do not depend on `theta`.
#[derive(Clone, Debug)]
pub struct CoalescentSimulator {
    model: CoalModel,
    sample: SampleConfig,
    loci: usize,
    names: Names,
    tajima: TajimaConstants,
    policy: AllAbsent,
}

impl CoalescentSimulator {
    pub fn new(model: CoalModel, sample: SampleConfig, loci: usize) -> Result<Self> {
        if sample.demes() != model.demes() {
            return Err(Error::InvalidArgument(format!(
                "{} needs {} deme(s) in the sample",
                model.label(),
                model.demes()
            )));
        }
        if loci == 0 {
            return Err(Error::InvalidArgument("at least one locus".into()));
        }
        Ok(CoalescentSimulator {
            model,
            names: popgen_names(sample.demes()),
            tajima: TajimaConstants::new(sample.total()),
            sample,
            loci,
            // a data set without a single segregating site reports D = 0 and
            // F_ST = 0 rather than failing the whole table
            policy: AllAbsent::Zero,
        })
    }

    pub fn with_policy(mut self, policy: AllAbsent) -> Self {
        self.policy = policy;
        self
    }

    pub fn sample(&self) -> &SampleConfig {
        &self.sample
    }

    pub fn loci(&self) -> usize {
        self.loci
    }

    pub fn locus_stats(&self, params: &[f64], seed: u64) -> Result<Vec<PopGenStats>> {
        let (theta, demography) = self.model.demography(params)?;
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParam(format!("theta = {theta} out of range")));
        }
        demography.validate()?;
        (0..self.loci)
            .map(|l| {
                let locus_seed = child_seed(seed, l as u64);
                let g = simulate_genealogy(&demography, &self.sample, child_seed(locus_seed, 0))?;
                let counts = site_counts(&g, theta, &mut rng_from_seed(child_seed(locus_seed, 1)));
                Ok(stats_from_counts(&self.sample, &self.tajima, &counts))
            })
            .collect()
    }
}

impl Simulator for CoalescentSimulator {
    fn stat_names(&self) -> &Names {
        &self.names
    }

    fn simulate(&self, params: &[f64], seed: u64) -> Result<SummaryVector> {
        let stats = self.locus_stats(params, seed)?;
        summarize(&stats, self.sample.demes(), self.policy)
    }
}

pub fn coal_model_with(
    model: CoalModel,
    params: Vec<ParamDef>,
    sample: SampleConfig,
    loci: usize,
) -> Result<ModelSpec> {
    let got: Vec<&str> = params.iter().map(|p| p.name.as_str()).collect();
    if got != model.param_names() {
        return Err(Error::InvalidParam(format!(
            "{} expects parameters {:?}, got {:?}",
            model.label(),
            model.param_names(),
            got
        )));
    }
    let sim = CoalescentSimulator::new(model, sample, loci)?;
    ModelSpec::new(model.label(), params, Arc::new(sim))
}

/// The model with its default priors and sampling design.
pub fn coal_model(model: CoalModel) -> ModelSpec {
    let (sample, loci) = model.default_design();
    coal_model_with(model, model.default_priors(), sample, loci).expect("valid defaults")
}
