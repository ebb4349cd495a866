use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summary::{check_names, Names, SummaryVector};
use crate::table::ReferenceTable;

const MAD_TO_SD: f64 = 1.4826;

/// Which estimate produced a column's scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleKind {
    Mad,
    Sd,
    Unit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "model")]
pub enum ScaleSource {
    Pooled,
    PerModel(String),
}

/// Per-statistic scale factors used to make distances comparable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Standardization {
    pub names: Names,
    pub scales: Vec<f64>,
    pub kinds: Vec<ScaleKind>,
    pub source: ScaleSource,
}

fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Scale of one column: 1.4826 x MAD about the median, falling back to the
/// sample standard deviation when the MAD is zero, and to 1 when that is
/// zero too.
pub fn mad_scale(column: &[f64]) -> (f64, ScaleKind) {
    assert!(!column.is_empty());
    let mut v = column.to_vec();
    let med = median_in_place(&mut v);
    for (x, c) in v.iter_mut().zip(column) {
        *x = (c - med).abs();
    }
    let mad = MAD_TO_SD * median_in_place(&mut v);
    if mad > 0.0 {
        return (mad, ScaleKind::Mad);
    }
    let n = column.len() as f64;
    if column.len() > 1 {
        let mean = column.iter().sum::<f64>() / n;
        let var = column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        if var > 0.0 {
            return (var.sqrt(), ScaleKind::Sd);
        }
    }
    (1.0, ScaleKind::Unit)
}

fn from_rows<'a>(
    names: &Names,
    rows: impl Iterator<Item = &'a [f64]> + Clone,
    source: ScaleSource,
) -> Result<Standardization> {
    let d = names.len();
    let mut scales = Vec::with_capacity(d);
    let mut kinds = Vec::with_capacity(d);
    for k in 0..d {
        let column: Vec<f64> = rows.clone().map(|r| r[k]).collect();
        if column.is_empty() {
            return Err(Error::EmptyTable);
        }
        let (s, kind) = mad_scale(&column);
        scales.push(s);
        kinds.push(kind);
    }
    Ok(Standardization {
        names: names.clone(),
        scales,
        kinds,
        source,
    })
}

/// Pooled standardization over every row of the table.
pub fn standardize(table: &ReferenceTable) -> Result<Standardization> {
    from_rows(
        table.stat_names(),
        table.rows().iter().map(|r| r.stats.as_slice()),
        ScaleSource::Pooled,
    )
}

/// Standardization from the rows of a single model.
pub fn standardize_model(table: &ReferenceTable, label: &str) -> Result<Standardization> {
    let m = table
        .model_index(label)
        .ok_or_else(|| Error::InvalidArgument(format!("model {label} is not in the table")))?;
    from_rows(
        table.stat_names(),
        table
            .rows()
            .iter()
            .filter(move |r| r.model == m)
            .map(|r| r.stats.as_slice()),
        ScaleSource::PerModel(label.to_string()),
    )
}

#[inline]
pub(crate) fn scaled_distance(s: &[f64], s0: &[f64], scales: &[f64]) -> f64 {
    s.iter()
        .zip(s0)
        .zip(scales)
        .map(|((a, b), c)| {
            let z = (a - b) / c;
            z * z
        })
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance between standardized statistics.
pub fn distance(s: &SummaryVector, s0: &SummaryVector, std: &Standardization) -> Result<f64> {
    check_names(&std.names, s.names())?;
    check_names(&std.names, s0.names())?;
    Ok(scaled_distance(s.values(), s0.values(), &std.scales))
}
