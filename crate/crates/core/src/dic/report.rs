use serde::{Deserialize, Serialize};

use crate::params::ParamVector;

/// How per-draw deviances are combined into an expected deviance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Mean,
    Median,
}

impl Aggregation {
    pub fn apply(self, values: &mut [f64]) -> f64 {
        assert!(!values.is_empty());
        match self {
            Aggregation::Mean => {
                // centred on the first value so that equal inputs average exactly
                let c = values[0];
                c + values.iter().map(|v| v - c).sum::<f64>() / values.len() as f64
            }
            Aggregation::Median => {
                values.sort_by(f64::total_cmp);
                let n = values.len();
                if n % 2 == 1 {
                    values[n / 2]
                } else {
                    0.5 * (values[n / 2 - 1] + values[n / 2])
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DicReport {
    pub variant: u8,
    pub d_bar: f64,
    pub d_hat: f64,
    pub p_d: f64,
    pub dic: f64,
    pub aggregation: Aggregation,
    pub n: usize,
    pub m: Option<usize>,
    pub epsilon: f64,
    pub point_estimate: ParamVector,
    pub warnings: Vec<String>,
}

impl DicReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        variant: u8,
        d_bar: f64,
        d_hat: f64,
        aggregation: Aggregation,
        n: usize,
        m: Option<usize>,
        epsilon: f64,
        point_estimate: ParamVector,
    ) -> Self {
        let p_d = d_bar - d_hat;
        let mut warnings = vec!["dHat reuses the simulation seeds of dBar".to_string()];
        if p_d < 0.0 {
            warnings.push(format!("negative pD ({p_d:.4})"));
        }
        DicReport {
            variant,
            d_bar,
            d_hat,
            p_d,
            dic: d_bar + p_d,
            aggregation,
            n,
            m,
            epsilon,
            point_estimate,
            warnings,
        }
    }
}
