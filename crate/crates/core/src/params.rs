use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::summary::Names;

/// Map between a parameter's support and the real line.
///
/// Regression adjustment and point estimation work on the transformed
/// (unconstrained) scale and map back with [`Transform::inverse`], which
/// always lands strictly inside the support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Transform {
    Identity,
    Log,
    Logit { a: f64, b: f64 },
}

impl Transform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::Logit { a, b } if !(a.is_finite() && b.is_finite() && a < b) => Err(
                Error::InvalidParam(format!("logit bounds must satisfy a < b, got ({a}, {b})")),
            ),
            _ => Ok(()),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        match *self {
            Transform::Identity => x.is_finite(),
            Transform::Log => x > 0.0 && x.is_finite(),
            Transform::Logit { a, b } => a < x && x < b,
        }
    }

    #[inline]
    pub fn forward(&self, x: f64) -> f64 {
        match *self {
            Transform::Identity => x,
            Transform::Log => x.ln(),
            Transform::Logit { a, b } => ((x - a) / (b - x)).ln(),
        }
    }

    #[inline]
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            Transform::Identity => y,
            Transform::Log => y.exp().clamp(f64::MIN_POSITIVE, f64::MAX),
            Transform::Logit { a, b } => {
                let x = if y >= 0.0 {
                    a + (b - a) / (1.0 + (-y).exp())
                } else {
                    let e = y.exp();
                    a + (b - a) * e / (1.0 + e)
                };
                x.clamp(a.next_up(), b.next_down())
            }
        }
    }
}

/// How the prior draw becomes the recorded parameter value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Record {
    /// The draw itself.
    #[default]
    Draw,
    /// The square of the draw (a prior stated on a scale, recorded as a variance).
    Square,
}

/// One parameter of a model: its name, prior and transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDef {
    pub name: String,
    pub prior: PriorSpec,
    pub transform: Transform,
    #[serde(default)]
    pub record: Record,
}

impl ParamDef {
    /// Parameter with the transform implied by the prior's support.
    pub fn new(name: impl Into<String>, prior: PriorSpec) -> Self {
        ParamDef {
            name: name.into(),
            transform: prior.natural_transform(),
            prior,
            record: Record::Draw,
        }
    }

    /// Parameter recorded as the square of its prior draw. The transform is
    /// always `Log`: the prior's own bounds do not apply to the square.
    pub fn squared(name: impl Into<String>, prior: PriorSpec) -> Self {
        ParamDef {
            transform: Transform::Log,
            record: Record::Square,
            ..ParamDef::new(name, prior)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.transform.validate()?;
        if self.record == Record::Square && !self.prior.is_positive() {
            return Err(Error::InvalidParam(format!(
                "{}: squared parameters need a positive prior",
                self.name
            )));
        }
        Ok(())
    }

    pub fn sample<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.prior.sample(rng);
        match self.record {
            Record::Draw => x,
            Record::Square => x * x,
        }
    }
}

/// Named parameter values with their support transforms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamVector {
    names: Names,
    transforms: Arc<[Transform]>,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(names: Names, transforms: Arc<[Transform]>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() || transforms.len() != values.len() {
            return Err(Error::InvalidParam(format!(
                "{} names, {} transforms, {} values",
                names.len(),
                transforms.len(),
                values.len()
            )));
        }
        for ((name, t), &v) in names.iter().zip(transforms.iter()).zip(&values) {
            if !t.in_support(v) {
                return Err(Error::InvalidParam(format!(
                    "{name} = {v} lies outside the support of {t:?}"
                )));
            }
        }
        Ok(ParamVector {
            names,
            transforms,
            values,
        })
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn transforms(&self) -> &Arc<[Transform]> {
        &self.transforms
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
