use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::params::{ParamDef, ParamVector, Transform};
use crate::summary::{Names, SummaryVector};

/// Stochastic map from parameter values to summary statistics.
///
/// Implementations must be pure: the same `(params, seed)` always gives the
/// same output, and every output carries [`Simulator::stat_names`].
pub trait Simulator: Send + Sync {
    fn stat_names(&self) -> &Names;

    /// `params` are in the order of the owning model's parameter list.
    fn simulate(&self, params: &[f64], seed: u64) -> Result<SummaryVector>;
}

/// A named generative model: priors plus simulator.
#[derive(Clone)]
pub struct ModelSpec {
    label: String,
    params: Vec<ParamDef>,
    param_names: Names,
    transforms: Arc<[Transform]>,
    simulator: Arc<dyn Simulator>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("stats", &self.simulator.stat_names())
            .finish()
    }
}

impl ModelSpec {
    pub fn new(
        label: impl Into<String>,
        params: Vec<ParamDef>,
        simulator: Arc<dyn Simulator>,
    ) -> Result<Self> {
        for p in &params {
            p.validate()?;
        }
        let param_names: Names = params.iter().map(|p| p.name.clone()).collect();
        let transforms: Arc<[Transform]> = params.iter().map(|p| p.transform).collect();
        Ok(ModelSpec {
            label: label.into(),
            params,
            param_names,
            transforms,
            simulator,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same model under another label (e.g. several prior variants of one
    /// registered model in a single table).
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn params(&self) -> &[ParamDef] {
        &self.params
    }

    pub fn param_names(&self) -> &Names {
        &self.param_names
    }

    pub fn transforms(&self) -> &Arc<[Transform]> {
        &self.transforms
    }

    pub fn stat_names(&self) -> &Names {
        self.simulator.stat_names()
    }

    pub fn sample_prior<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<ParamVector> {
        let values = self.params.iter().map(|p| p.sample(rng)).collect();
        self.param_vector(values)
    }

    pub fn param_vector(&self, values: Vec<f64>) -> Result<ParamVector> {
        ParamVector::new(self.param_names.clone(), self.transforms.clone(), values)
    }

    /// Simulate and validate names and finiteness of the output.
    pub fn simulate(&self, params: &[f64], seed: u64) -> Result<SummaryVector> {
        if params.len() != self.params.len() {
            return Err(Error::InvalidParam(format!(
                "{} expects {} parameters, got {}",
                self.label,
                self.params.len(),
                params.len()
            )));
        }
        let s = self.simulator.simulate(params, seed)?;
        s.check_names(self.stat_names())?;
        Ok(s)
    }
}
