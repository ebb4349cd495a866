use std::f64::consts::TAU;

use serde::Serialize;

use crate::abc::Standardization;
use crate::error::{Error, Result};
use crate::summary::{check_names, Names, SummaryVector};

/// Bandwidth and per-statistic scales of the Gaussian deviance kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelConfig {
    pub epsilon: f64,
    pub names: Names,
    pub scales: Vec<f64>,
    /// `d * ln(2 pi epsilon^2)`, the value of `-2 log K` at the origin.
    #[serde(skip)]
    offset: f64,
}

impl KernelConfig {
    pub fn new(epsilon: f64, std: &Standardization) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel bandwidth must be positive, got {epsilon}")));
        }
        if std.scales.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidArgument("kernel scales must be positive".into()));
        }
        let d = std.scales.len() as f64;
        Ok(KernelConfig {
            epsilon,
            names: std.names.clone(),
            scales: std.scales.clone(),
            offset: d * (TAU * epsilon * epsilon).ln(),
        })
    }

    pub fn dim(&self) -> usize {
        self.scales.len()
    }

    #[inline]
    pub(crate) fn neg2_log(&self, s: &[f64], s0: &[f64]) -> f64 {
        let inv = 1.0 / self.epsilon;
        let q: f64 = s
            .iter()
            .zip(s0)
            .zip(&self.scales)
            .map(|((a, b), c)| {
                let z = (a - b) / c * inv;
                z * z
            })
            .sum();
        self.offset + q
    }
}

/// `-2 log K_eps(s - s0) = d ln(2 pi eps^2) + sum_k ((s_k - s0_k) / (scale_k eps))^2`.
pub fn neg2_log_kernel(s: &SummaryVector, s0: &SummaryVector, k: &KernelConfig) -> Result<f64> {
    check_names(&k.names, s.names())?;
    check_names(&k.names, s0.names())?;
    Ok(k.neg2_log(s.values(), s0.values()))
}
