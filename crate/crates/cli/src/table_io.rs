//! Reference tables on disk.
//!
//! A table is a CSV file with the header
//! `row,model,param:<name>...,stat:<name>...` plus a JSON sidecar
//! (`<stem>.meta.json`) holding the root seed, the row count and each
//! model's parameter layout. Parameter columns are the union over models;
//! a row leaves the columns of other models' parameters empty. Reading is
//! driven by the header names, so column order does not matter.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use abcdic_core::table::{ModelLayout, TableRow};
use abcdic_core::{names, ReferenceTable, Transform};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::fmt_f64;

const META_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TableMeta {
    pub version: u32,
    pub root_seed: u64,
    pub rows: usize,
    pub stat_names: Vec<String>,
    pub models: Vec<MetaModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MetaModel {
    pub label: String,
    pub params: Vec<String>,
    pub transforms: Vec<Transform>,
}

pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

impl TableMeta {
    pub fn of(table: &ReferenceTable) -> Self {
        TableMeta {
            version: META_VERSION,
            root_seed: table.root_seed(),
            rows: table.len(),
            stat_names: table.stat_names().to_vec(),
            models: table
                .models()
                .iter()
                .map(|m| MetaModel {
                    label: m.label.clone(),
                    params: m.param_names.to_vec(),
                    transforms: m.transforms.to_vec(),
                })
                .collect(),
        }
    }
}

fn param_columns(table: &ReferenceTable) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for m in table.models() {
        for p in m.param_names.iter() {
            if !cols.contains(p) {
                cols.push(p.clone());
            }
        }
    }
    cols
}

/// The table as CSV text and its sidecar as JSON text.
pub fn encode_table(table: &ReferenceTable) -> (Vec<u8>, Vec<u8>) {
    let params = param_columns(table);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "model".to_string()];
    header.extend(params.iter().map(|p| format!("param:{p}")));
    header.extend(table.stat_names().iter().map(|s| format!("stat:{s}")));
    w.write_record(&header).expect("in-memory write");
    let slots: Vec<Vec<Option<usize>>> = table
        .models()
        .iter()
        .map(|m| params.iter().map(|p| m.param_names.iter().position(|q| q == p)).collect())
        .collect();
    let mut record = Vec::with_capacity(header.len());
    for r in table.rows() {
        record.clear();
        record.push(r.index.to_string());
        record.push(table.models()[r.model].label.clone());
        for slot in &slots[r.model] {
            record.push(slot.map(|k| fmt_f64(r.params[k])).unwrap_or_default());
        }
        record.extend(r.stats.iter().map(|&v| fmt_f64(v)));
        w.write_record(&record).expect("in-memory write");
    }
    let csv = w.into_inner().expect("in-memory flush");
    let mut meta = serde_json::to_vec_pretty(&TableMeta::of(table)).expect("meta serializes");
    meta.push(b'\n');
    (csv, meta)
}

pub fn write_table(path: &Path, table: &ReferenceTable) -> CliResult<()> {
    let (csv, meta) = encode_table(table);
    fs::write(path, csv).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    let mp = meta_path(path);
    fs::write(&mp, meta).map_err(|e| CliError::io(format!("writing {}", mp.display()), e))
}

enum Column {
    Row,
    Model,
    Param(usize),
    Stat(usize),
}

/// Parse a table from CSV text and its sidecar.
pub fn decode_table(path: &Path, csv_text: &[u8], meta: &TableMeta) -> CliResult<ReferenceTable> {
    let err = |msg: String| CliError::table(path, msg);
    if meta.version != META_VERSION {
        return Err(err(format!("unsupported table metadata version {}", meta.version)));
    }
    let mut param_names: Vec<String> = Vec::new();
    for m in &meta.models {
        if m.params.len() != m.transforms.len() {
            return Err(err(format!("model {}: params and transforms differ in length", m.label)));
        }
        for p in &m.params {
            if !param_names.contains(p) {
                param_names.push(p.clone());
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new().from_reader(csv_text);
    let header = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
    let mut columns = Vec::with_capacity(header.len());
    let (mut seen_param, mut seen_stat) = (vec![false; param_names.len()], vec![false; meta.stat_names.len()]);
    for (i, h) in header.iter().enumerate() {
        let col = if h == "row" {
            Column::Row
        } else if h == "model" {
            Column::Model
        } else if let Some(p) = h.strip_prefix("param:").and_then(|p| param_names.iter().position(|q| q == p)) {
            seen_param[p] = true;
            Column::Param(p)
        } else if let Some(s) = h.strip_prefix("stat:").and_then(|s| meta.stat_names.iter().position(|q| q == s)) {
            seen_stat[s] = true;
            Column::Stat(s)
        } else {
            return Err(err(format!("line 1: unexpected column {h:?} (column {})", i + 1)));
        };
        columns.push(col);
    }
    let has = |name: &str| header.iter().any(|h| h == name);
    let missing: Vec<String> = ["row", "model"]
        .iter()
        .filter(|c| !has(c))
        .map(|c| c.to_string())
        .chain(param_names.iter().zip(&seen_param).filter(|(_, s)| !**s).map(|(p, _)| format!("param:{p}")))
        .chain(meta.stat_names.iter().zip(&seen_stat).filter(|(_, s)| !**s).map(|(p, _)| format!("stat:{p}")))
        .collect();
    if !missing.is_empty() {
        return Err(err(format!("line 1: missing columns {}", missing.join(", "))));
    }
    if header.len() != 2 + param_names.len() + meta.stat_names.len() {
        return Err(err("line 1: duplicate column names".into()));
    }

    let labels: HashMap<&str, usize> = meta.models.iter().enumerate().map(|(i, m)| (m.label.as_str(), i)).collect();
    // position of each global parameter column within each model's vector
    let slots: Vec<Vec<Option<usize>>> = meta
        .models
        .iter()
        .map(|m| param_names.iter().map(|p| m.params.iter().position(|q| q == p)).collect())
        .collect();

    let mut rows = Vec::new();
    let mut last_line = 1;
    for record in rdr.records() {
        let record = record.map_err(|e| match e.position() {
            Some(p) => err(format!("line {}: {e}", p.line())),
            None => err(e.to_string()),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        last_line = line;
        let at = |msg: String| err(format!("line {line}: {msg}"));
        let num = |field: &str, what: &str| -> CliResult<f64> {
            field
                .parse::<f64>()
                .map_err(|_| at(format!("{what}: cannot parse {field:?} as a number")))
        };
        let mut index = None;
        let mut model = None;
        let mut params: Vec<Option<f64>> = vec![None; param_names.len()];
        let mut stats = vec![0.0; meta.stat_names.len()];
        for (field, col) in record.iter().zip(&columns) {
            match *col {
                Column::Row => {
                    index = Some(field.parse::<usize>().map_err(|_| at(format!("bad row index {field:?}")))?)
                }
                Column::Model => {
                    model = Some(*labels.get(field).ok_or_else(|| at(format!("unknown model {field:?}")))?)
                }
                Column::Param(p) if !field.is_empty() => params[p] = Some(num(field, &param_names[p])?),
                Column::Param(_) => {}
                Column::Stat(s) => stats[s] = num(field, &meta.stat_names[s])?,
            }
        }
        let (index, model) = (index.expect("row column present"), model.expect("model column present"));
        let mut values = vec![f64::NAN; meta.models[model].params.len()];
        for (p, slot) in slots[model].iter().enumerate() {
            match (slot, params[p]) {
                (Some(k), Some(v)) => values[*k] = v,
                (Some(_), None) => return Err(at(format!("missing value for param:{}", param_names[p]))),
                (None, Some(_)) => {
                    return Err(at(format!(
                        "param:{} is not a parameter of {}",
                        param_names[p], meta.models[model].label
                    )))
                }
                (None, None) => {}
            }
        }
        rows.push(TableRow {
            index,
            model,
            params: values,
            stats,
        });
    }
    if rows.is_empty() {
        return Err(err("empty table".into()));
    }
    if rows.len() != meta.rows {
        return Err(err(format!(
            "truncated or padded file: metadata declares {} rows, found {} (last record on line {last_line})",
            meta.rows,
            rows.len()
        )));
    }
    let models = meta
        .models
        .iter()
        .map(|m| ModelLayout {
            label: m.label.clone(),
            param_names: names(m.params.iter().cloned()),
            transforms: Arc::from(m.transforms.clone()),
        })
        .collect();
    ReferenceTable::from_rows(meta.root_seed, models, names(meta.stat_names.iter().cloned()), rows)
        .map_err(|e| err(e.to_string()))
}

pub fn read_table(path: &Path) -> CliResult<ReferenceTable> {
    let mp = meta_path(path);
    let meta_text = fs::read(&mp).map_err(|e| CliError::table(&mp, e.to_string()))?;
    let meta: TableMeta =
        serde_json::from_slice(&meta_text).map_err(|e| CliError::table(&mp, e.to_string()))?;
    let csv_text = fs::read(path).map_err(|e| CliError::table(path, e.to_string()))?;
    decode_table(path, &csv_text, &meta)
}
