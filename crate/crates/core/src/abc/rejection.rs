use serde::Serialize;

use crate::abc::standardize::{scaled_distance, Standardization};
use crate::error::{Error, Result};
use crate::params::ParamVector;
use crate::summary::{check_names, SummaryVector};
use crate::table::{ModelLayout, ReferenceTable};

/// Rows taking part in a rejection step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection<'a> {
    All,
    Model(&'a str),
}

/// Epanechnikov weight `1 - (d / tolerance)^2`, zero outside the tolerance.
/// A zero tolerance gives weight 1 to exact matches.
#[inline]
pub fn epanechnikov(distance: f64, tolerance: f64) -> f64 {
    if tolerance > 0.0 {
        let u = distance / tolerance;
        (1.0 - u * u).max(0.0)
    } else if distance == 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptedRow {
    /// Global row index in the reference table.
    pub row: usize,
    /// Model index in the reference table.
    pub model: usize,
    pub theta: Vec<f64>,
    /// Adjusted values; equal to `theta` until an adjustment is applied.
    pub theta_adj: Vec<f64>,
    pub weight: f64,
    pub distance: f64,
}

/// Accepted simulations with their weights and the context that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSample {
    pub observed: SummaryVector,
    /// Layout of the selected model, `None` when rows from several models
    /// were pooled.
    pub layout: Option<ModelLayout>,
    pub tolerance: f64,
    pub acceptance_rate: f64,
    pub standardization: Standardization,
    pub adjusted: bool,
    pub rows: Vec<AcceptedRow>,
}

impl PosteriorSample {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weight).collect()
    }

    pub fn single_layout(&self) -> Result<&ModelLayout> {
        self.layout.as_ref().ok_or_else(|| {
            Error::InvalidArgument("posterior sample mixes several models".into())
        })
    }

    /// Adjusted parameter vector of accepted row `i`.
    pub fn adjusted_params(&self, i: usize) -> Result<ParamVector> {
        let l = self.single_layout()?;
        ParamVector::new(l.param_names.clone(), l.transforms.clone(), self.rows[i].theta_adj.clone())
    }
}

/// Number of rows kept at acceptance `rate` out of `n`.
pub(crate) fn accepted_count(rate: f64, n: usize) -> Result<usize> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!("acceptance rate {rate} outside (0, 1]")));
    }
    let target = rate * n as f64;
    if target < 2.0 - 1e-9 {
        return Err(Error::TooFewAcceptances { rate, rows: n });
    }
    Ok(((target - 1e-9).ceil() as usize).clamp(2, n))
}

/// Rejection step at a target acceptance rate.
///
/// The tolerance is the `k`-th smallest distance among the selected rows with
/// `k = ceil(rate * n)`; every row at or below it is accepted (ties at the
/// threshold included) and weighted with the Epanechnikov kernel.
pub fn reject(
    table: &ReferenceTable,
    s0: &SummaryVector,
    rate: f64,
    selection: Selection<'_>,
    std: &Standardization,
) -> Result<PosteriorSample> {
    check_names(table.stat_names(), s0.names())?;
    check_names(table.stat_names(), &std.names)?;
    let model = match selection {
        Selection::All => None,
        Selection::Model(label) => Some(table.model_index(label).ok_or_else(|| {
            Error::InvalidArgument(format!("model {label} is not in the table"))
        })?),
    };
    let scored: Vec<(usize, f64)> = table
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, r)| model.is_none_or(|m| r.model == m))
        .map(|(pos, r)| (pos, scaled_distance(&r.stats, s0.values(), &std.scales)))
        .collect();
    if scored.is_empty() {
        return Err(Error::EmptyTable);
    }
    let k = accepted_count(rate, scored.len())?;
    let mut ds: Vec<f64> = scored.iter().map(|&(_, d)| d).collect();
    let (_, kth, _) = ds.select_nth_unstable_by(k - 1, f64::total_cmp);
    let tolerance = *kth;

    let rows: Vec<AcceptedRow> = scored
        .iter()
        .filter(|&&(_, d)| d <= tolerance)
        .map(|&(pos, d)| {
            let r = &table.rows()[pos];
            AcceptedRow {
                row: r.index,
                model: r.model,
                theta: r.params.clone(),
                theta_adj: r.params.clone(),
                weight: epanechnikov(d, tolerance),
                distance: d,
            }
        })
        .collect();
    if rows.iter().all(|r| r.weight == 0.0) {
        return Err(Error::DegenerateWeights);
    }

    let layout = match model {
        Some(m) => Some(table.models()[m].clone()),
        None if table.models().len() == 1 => Some(table.models()[0].clone()),
        None => None,
    };
    Ok(PosteriorSample {
        observed: s0.clone(),
        layout,
        tolerance,
        acceptance_rate: rate,
        standardization: std.clone(),
        adjusted: false,
        rows,
    })
}
