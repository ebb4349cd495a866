//! Reference tables of prior-predictive simulations.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::par;
use crate::params::{ParamVector, Transform};
use crate::rng::{child_seed, rng_from_seed};
use crate::summary::{same_names, Names, SummaryVector};

/// Parameter layout of one model in a table.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelLayout {
    pub label: String,
    pub param_names: Names,
    pub transforms: Arc<[Transform]>,
}

impl ModelLayout {
    pub fn of(model: &ModelSpec) -> Self {
        ModelLayout {
            label: model.label().to_string(),
            param_names: model.param_names().clone(),
            transforms: model.transforms().clone(),
        }
    }
}

/// One simulation: global row index, model index into the table's model
/// list, parameter values and statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub index: usize,
    pub model: usize,
    pub params: Vec<f64>,
    pub stats: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTable {
    root_seed: u64,
    models: Vec<ModelLayout>,
    stat_names: Names,
    rows: Vec<TableRow>,
}

/// Seed of row `index` in a table built from `root_seed`.
pub fn row_seed(root_seed: u64, index: usize) -> u64 {
    child_seed(root_seed, index as u64)
}

/// Simulate `n_per_model` prior-predictive rows for each model.
///
/// Row `m * n_per_model + i` draws its parameters from
/// `child_seed(row_seed, 0)` and simulates with `child_seed(row_seed, 1)`,
/// where `row_seed = child_seed(root_seed, row)`. The table is therefore a
/// pure function of `(models, n_per_model, root_seed)`.
pub fn build_reference_table(
    models: &[ModelSpec],
    n_per_model: usize,
    root_seed: u64,
) -> Result<ReferenceTable> {
    if n_per_model == 0 {
        return Err(Error::InvalidArgument("need at least one simulation per model".into()));
    }
    let first = models
        .first()
        .ok_or_else(|| Error::InvalidArgument("no models".into()))?;
    let stat_names = first.stat_names().clone();
    for m in models {
        if !same_names(m.stat_names(), &stat_names) {
            return Err(Error::NameMismatch {
                expected: stat_names.to_vec(),
                found: m.stat_names().to_vec(),
            });
        }
    }

    let total = n_per_model * models.len();
    let rows = par::try_map_indexed(total, |index| {
        let model = index / n_per_model;
        let spec = &models[model];
        let seed = row_seed(root_seed, index);
        simulate_row(spec, seed)
            .map(|(params, stats)| TableRow {
                index,
                model,
                params,
                stats,
            })
            .map_err(|e| Error::Row {
                row: index,
                seed,
                source: Box::new(e),
            })
    })?;

    Ok(ReferenceTable {
        root_seed,
        models: models.iter().map(ModelLayout::of).collect(),
        stat_names,
        rows,
    })
}

fn simulate_row(spec: &ModelSpec, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = rng_from_seed(child_seed(seed, 0));
    let theta = spec.sample_prior(&mut rng)?;
    let s = spec.simulate(theta.values(), child_seed(seed, 1))?;
    Ok((theta.values().to_vec(), s.values().to_vec()))
}

impl ReferenceTable {
    /// Assemble a table from parts (used when reading from disk). Rows are
    /// sorted by index; indices must be unique and every row must match its
    /// model's layout and the statistic names.
    pub fn from_rows(
        root_seed: u64,
        models: Vec<ModelLayout>,
        stat_names: Names,
        mut rows: Vec<TableRow>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        rows.sort_by_key(|r| r.index);
        for w in rows.windows(2) {
            if w[0].index == w[1].index {
                return Err(Error::InvalidArgument(format!("duplicate row index {}", w[0].index)));
            }
        }
        for r in &rows {
            let layout = models.get(r.model).ok_or_else(|| {
                Error::InvalidArgument(format!("row {} has unknown model {}", r.index, r.model))
            })?;
            if r.stats.len() != stat_names.len() {
                return Err(Error::InvalidArgument(format!(
                    "row {} has {} statistics, expected {}",
                    r.index,
                    r.stats.len(),
                    stat_names.len()
                )));
            }
            if let Some(v) = r.stats.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSummary(format!("row {} has statistic {v}", r.index)));
            }
            ParamVector::new(
                layout.param_names.clone(),
                layout.transforms.clone(),
                r.params.clone(),
            )
            .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", r.index)))?;
        }
        Ok(ReferenceTable {
            root_seed,
            models,
            stat_names,
            rows,
        })
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn models(&self) -> &[ModelLayout] {
        &self.models
    }

    pub fn model_index(&self, label: &str) -> Option<usize> {
        self.models.iter().position(|m| m.label == label)
    }

    pub fn stat_names(&self) -> &Names {
        &self.stat_names
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Position of a row in [`ReferenceTable::rows`] from its global index.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.rows.binary_search_by_key(&index, |r| r.index).ok()
    }

    pub fn summary(&self, pos: usize) -> SummaryVector {
        SummaryVector::new(self.stat_names.clone(), self.rows[pos].stats.clone())
            .expect("table rows are validated")
    }

    pub fn param_vector(&self, pos: usize) -> ParamVector {
        let r = &self.rows[pos];
        let layout = &self.models[r.model];
        ParamVector::new(
            layout.param_names.clone(),
            layout.transforms.clone(),
            r.params.clone(),
        )
        .expect("table rows are validated")
    }

    /// Sub-table with the rows of the given models only (row indices kept).
    pub fn select_models(&self, labels: &[&str]) -> Result<ReferenceTable> {
        let keep: Vec<usize> = labels
            .iter()
            .map(|l| {
                self.model_index(l)
                    .ok_or_else(|| Error::InvalidArgument(format!("model {l} is not in the table")))
            })
            .collect::<Result<_>>()?;
        let models = keep.iter().map(|&m| self.models[m].clone()).collect();
        let rows = self
            .rows
            .iter()
            .filter_map(|r| {
                keep.iter().position(|&m| m == r.model).map(|new| TableRow {
                    model: new,
                    ..r.clone()
                })
            })
            .collect();
        ReferenceTable::from_rows(self.root_seed, models, self.stat_names.clone(), rows)
    }
}
