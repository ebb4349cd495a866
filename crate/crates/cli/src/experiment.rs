//! End-to-end runs: table, observed data, per-replicate inference and the
//! summaries built from them.
//!
//! Seeds derive from the root seed alone: the table uses
//! `child_seed(root, 0)`; replicate `i` (numbered across generators in
//! config order) uses `r = child_seed(child_seed(root, 1), i)`, simulating
//! its observed data from `child_seed(r, 0)` and running inference from
//! `child_seed(r, 1)`.

use std::collections::BTreeMap;
use std::fmt;

use abcdic_core::abc::{standardize, Standardization};
use abcdic_core::rng::child_seed;
use abcdic_core::{build_reference_table, par, ModelSpec, ReferenceTable, SummaryVector};
use serde::Serialize;

use crate::analysis::{analyze, Context, ObservationResult, Plan};
use crate::config::{ExperimentConfig, ModelEntry, Observed};
use crate::error::{CliError, CliResult};
use crate::registry::{build_model, Candidate};
use crate::table_io::read_table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Infer,
    Dic,
    Predcheck,
    Modelprob,
    Experiment,
    Scan,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Simulate,
        Command::Infer,
        Command::Dic,
        Command::Predcheck,
        Command::Modelprob,
        Command::Experiment,
        Command::Scan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Infer => "infer",
            Command::Dic => "dic",
            Command::Predcheck => "predcheck",
            Command::Modelprob => "modelprob",
            Command::Experiment => "experiment",
            Command::Scan => "scan",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The parts of the config a command uses.
pub fn plan_for(command: Command, config: &ExperimentConfig) -> CliResult<Plan> {
    let d = &config.dic;
    let mut plan = Plan {
        rate: config.rate,
        adjust: config.adjust,
        dic_variants: Vec::new(),
        dic_n: d.n,
        dic_m: d.m,
        dic_n_per_draw: d.n_per_draw,
        predictive_n: None,
        prob_methods: Vec::new(),
        keep_posterior: false,
    };
    let dic_variants = || {
        if d.variants.is_empty() {
            Err(CliError::Config(format!("{command} needs at least one dic variant")))
        } else {
            Ok(d.variants.clone())
        }
    };
    let prob_methods = || {
        if config.models.len() < 2 {
            Err(CliError::Config("model probabilities need at least two models".into()))
        } else if config.model_probs.is_empty() {
            Err(CliError::Config("modelProbs lists no method".into()))
        } else {
            Ok(config.model_probs.clone())
        }
    };
    match command {
        Command::Simulate => {}
        Command::Infer => plan.keep_posterior = true,
        Command::Dic | Command::Scan => plan.dic_variants = dic_variants()?,
        Command::Predcheck => plan.predictive_n = Some(config.predictive.as_ref().map_or(1000, |p| p.n)),
        Command::Modelprob => plan.prob_methods = prob_methods()?,
        Command::Experiment => {
            plan.dic_variants = d.variants.clone();
            plan.predictive_n = config.predictive.as_ref().map(|p| p.n);
            if config.models.len() > 1 {
                plan.prob_methods = config.model_probs.clone();
            }
        }
    }
    Ok(plan)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Simulated,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableInfo {
    pub source: TableSource,
    pub root_seed: u64,
    pub rows: usize,
    pub rows_per_model: BTreeMap<String, usize>,
    pub stat_names: Vec<String>,
}

impl TableInfo {
    fn of(table: &ReferenceTable, source: TableSource) -> Self {
        let mut rows_per_model = BTreeMap::new();
        for r in table.rows() {
            *rows_per_model.entry(table.models()[r.model].label.clone()).or_insert(0) += 1;
        }
        TableInfo {
            source,
            root_seed: table.root_seed(),
            rows: table.len(),
            rows_per_model,
            stat_names: table.stat_names().to_vec(),
        }
    }
}

/// Models built and the reference table ready.
pub struct Prepared {
    pub config: ExperimentConfig,
    pub candidates: Vec<Candidate>,
    pub table: ReferenceTable,
    pub source: TableSource,
}

fn check_scan(models: &[ModelEntry]) -> CliResult<()> {
    let first = &models[0];
    for m in &models[1..] {
        if m.name != first.name
            || m.sample_size != first.sample_size
            || m.sample != first.sample
            || m.loci != first.loci
        {
            return Err(CliError::Config(format!(
                "scan models must differ only in priors: {} and {} differ in model or design",
                first.label(),
                m.label()
            )));
        }
    }
    Ok(())
}

pub fn prepare(command: Command, config: ExperimentConfig) -> CliResult<Prepared> {
    config.validate()?;
    if command == Command::Scan {
        check_scan(&config.models)?;
    }
    let candidates: Vec<Candidate> = config.models.iter().map(build_model).collect::<CliResult<_>>()?;
    let stats = candidates[0].spec.stat_names().clone();
    if let Some(c) = candidates.iter().find(|c| c.spec.stat_names() != &stats) {
        return Err(CliError::Config(format!(
            "{} and {} produce different statistics",
            candidates[0].label(),
            c.label()
        )));
    }
    let specs: Vec<ModelSpec> = candidates.iter().map(|c| c.spec.clone()).collect();
    let (table, source) = match &config.table.path {
        Some(path) => {
            let full = read_table(path)?;
            let labels: Vec<&str> = candidates.iter().map(|c| c.label()).collect();
            let table = full.select_models(&labels).map_err(|e| CliError::table(path, e.to_string()))?;
            for c in &candidates {
                let layout = &table.models()[table.model_index(c.label()).expect("selected")];
                if layout.param_names != *c.spec.param_names() {
                    return Err(CliError::table(
                        path,
                        format!(
                            "model {} has parameters {:?} in the table but {:?} in the config",
                            c.label(),
                            layout.param_names,
                            c.spec.param_names()
                        ),
                    ));
                }
            }
            if table.stat_names() != &stats {
                return Err(CliError::table(
                    path,
                    format!("table statistics {:?} differ from the models' {:?}", table.stat_names(), stats),
                ));
            }
            (table, TableSource::File)
        }
        None => (
            build_reference_table(&specs, config.table.per_model, child_seed(config.root_seed, 0))?,
            TableSource::Simulated,
        ),
    };
    Ok(Prepared {
        config,
        candidates,
        table,
        source,
    })
}

/// One observed data set to analyse.
struct Job {
    truth: Option<String>,
    source: JobSource,
}

enum JobSource {
    Given(SummaryVector),
    Generated { spec: ModelSpec, params: Vec<f64> },
}

fn jobs(prepared: &Prepared) -> CliResult<Vec<Job>> {
    let stats = prepared.table.stat_names();
    match &prepared.config.observed {
        None => Err(CliError::Config("this command needs observed data".into())),
        Some(Observed::Values(values)) => {
            if let Some(k) = values.keys().find(|k| !stats.contains(k)) {
                return Err(CliError::Config(format!(
                    "observed statistic {k:?} is not produced by the models ({})",
                    stats.join(", ")
                )));
            }
            let v = stats
                .iter()
                .map(|s| {
                    values
                        .get(s)
                        .copied()
                        .ok_or_else(|| CliError::Config(format!("observed value for {s:?} is missing")))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let s0 = SummaryVector::new(stats.clone(), v).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(vec![Job {
                truth: None,
                source: JobSource::Given(s0),
            }])
        }
        Some(Observed::Generate(gens)) => {
            let mut out = Vec::new();
            for g in gens {
                let candidate = match prepared.candidates.iter().find(|c| c.label() == g.model) {
                    Some(c) => c.clone(),
                    None => build_model(&ModelEntry::named(&g.model))?,
                };
                if candidate.spec.stat_names() != stats {
                    return Err(CliError::Config(format!(
                        "generator {} produces different statistics from the models",
                        g.model
                    )));
                }
                let params = candidate.param_values(&g.params)?;
                for _ in 0..g.replicates {
                    out.push(Job {
                        truth: Some(g.model.clone()),
                        source: JobSource::Generated {
                            spec: candidate.spec.clone(),
                            params: params.clone(),
                        },
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Results of a run, ready to be written as a bundle.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    pub config: ExperimentConfig,
    pub table: TableInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Standardization>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<ObservationResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub selection: Vec<SelectionRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dic_summary: Vec<DicSummaryRow>,
    #[serde(skip)]
    pub reference: ReferenceTable,
    #[serde(skip)]
    pub kind: Command,
}

pub fn run(command: Command, config: ExperimentConfig) -> CliResult<Report> {
    let prepared = prepare(command, config)?;
    run_prepared(command, &prepared)
}

pub fn run_prepared(command: Command, prepared: &Prepared) -> CliResult<Report> {
    let plan = plan_for(command, &prepared.config)?;
    run_plan(command, prepared, &plan)
}

/// Run with an explicit plan instead of the one implied by the command.
pub fn run_plan(command: Command, prepared: &Prepared, plan: &Plan) -> CliResult<Report> {
    let info = TableInfo::of(&prepared.table, prepared.source);
    if command == Command::Simulate {
        return Ok(Report {
            command: command.to_string(),
            config: prepared.config.clone(),
            table: info,
            standardization: None,
            observations: Vec::new(),
            selection: Vec::new(),
            dic_summary: Vec::new(),
            reference: prepared.table.clone(),
            kind: command,
        });
    }
    let std = standardize(&prepared.table)?;
    let specs: Vec<ModelSpec> = prepared.candidates.iter().map(|c| c.spec.clone()).collect();
    let ctx = Context {
        table: &prepared.table,
        std: &std,
        models: &specs,
    };
    let jobs = jobs(prepared)?;
    let base = child_seed(prepared.config.root_seed, 1);
    let observations = par::try_map_indexed(jobs.len(), |i| {
        let job = &jobs[i];
        let rep_seed = child_seed(base, i as u64);
        let observed = match &job.source {
            JobSource::Given(s) => s.clone(),
            JobSource::Generated { spec, params } => spec.simulate(params, child_seed(rep_seed, 0))?,
        };
        let agg = prepared.config.dic.aggregation_for(job.truth.as_deref());
        analyze(&ctx, plan, observed, child_seed(rep_seed, 1), agg, i, job.truth.clone())
    })?;
    let labels: Vec<String> = specs.iter().map(|s| s.label().to_string()).collect();
    let selection = selection_summary(&observations, &labels);
    let dic_summary = dic_summary(&observations, &labels, &plan.dic_variants);
    Ok(Report {
        command: command.to_string(),
        config: prepared.config.clone(),
        table: info,
        standardization: Some(std),
        observations,
        selection,
        dic_summary,
        reference: prepared.table.clone(),
        kind: command,
    })
}

/// Share of replicates in which a candidate won a criterion. A tie between
/// `k` candidates gives each `1/k` of that replicate and is counted in
/// `ties`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionRow {
    pub truth: String,
    pub criterion: String,
    pub candidate: String,
    pub wins: f64,
    pub replicates: usize,
    pub frequency: f64,
    pub ties: usize,
}

fn truth_label(o: &ObservationResult) -> &str {
    o.truth.as_deref().unwrap_or("observed")
}

fn truths(observations: &[ObservationResult]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for o in observations {
        if !out.contains(&truth_label(o)) {
            out.push(truth_label(o));
        }
    }
    out
}

pub fn selection_summary(observations: &[ObservationResult], labels: &[String]) -> Vec<SelectionRow> {
    let mut criteria: Vec<&str> = Vec::new();
    for o in observations {
        for s in &o.selected {
            if !criteria.contains(&s.criterion.as_str()) {
                criteria.push(&s.criterion);
            }
        }
    }
    let mut rows = Vec::new();
    for truth in truths(observations) {
        for &criterion in &criteria {
            let mut wins = vec![0.0; labels.len()];
            let mut ties = vec![0usize; labels.len()];
            let mut replicates = 0;
            for o in observations.iter().filter(|o| truth_label(o) == truth) {
                let Some(winners) = o.winners(criterion) else { continue };
                if winners.is_empty() {
                    continue;
                }
                replicates += 1;
                let share = 1.0 / winners.len() as f64;
                for w in winners {
                    let k = labels.iter().position(|l| l == w).expect("winner is a candidate");
                    wins[k] += share;
                    if winners.len() > 1 {
                        ties[k] += 1;
                    }
                }
            }
            if replicates == 0 {
                continue;
            }
            for (k, label) in labels.iter().enumerate() {
                rows.push(SelectionRow {
                    truth: truth.to_string(),
                    criterion: criterion.to_string(),
                    candidate: label.clone(),
                    wins: wins[k],
                    replicates,
                    frequency: wins[k] / replicates as f64,
                    ties: ties[k],
                });
            }
        }
    }
    rows
}

/// Mean and standard deviation of DIC over the replicates of one true model.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DicSummaryRow {
    pub truth: String,
    pub candidate: String,
    pub variant: u8,
    pub replicates: usize,
    pub mean_dic: f64,
    pub sd_dic: f64,
    pub mean_d_bar: f64,
    pub mean_p_d: f64,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

pub fn dic_summary(observations: &[ObservationResult], labels: &[String], variants: &[u8]) -> Vec<DicSummaryRow> {
    let mut rows = Vec::new();
    for truth in truths(observations) {
        let group: Vec<&ObservationResult> = observations.iter().filter(|o| truth_label(o) == truth).collect();
        for label in labels {
            for &v in variants {
                let reports: Vec<_> = group
                    .iter()
                    .filter_map(|o| o.candidate(label).and_then(|c| c.dic(v)))
                    .collect();
                if reports.is_empty() {
                    continue;
                }
                let dic: Vec<f64> = reports.iter().map(|r| r.dic).collect();
                let (mean_dic, sd_dic) = mean_sd(&dic);
                let n = reports.len() as f64;
                rows.push(DicSummaryRow {
                    truth: truth.to_string(),
                    candidate: label.clone(),
                    variant: v,
                    replicates: reports.len(),
                    mean_dic,
                    sd_dic,
                    mean_d_bar: reports.iter().map(|r| r.d_bar).sum::<f64>() / n,
                    mean_p_d: reports.iter().map(|r| r.p_d).sum::<f64>() / n,
                });
            }
        }
    }
    rows
}

impl Report {
    /// Selection frequency of `candidate` under `criterion` for data from `truth`.
    pub fn frequency(&self, truth: &str, criterion: &str, candidate: &str) -> Option<f64> {
        self.selection
            .iter()
            .find(|r| r.truth == truth && r.criterion == criterion && r.candidate == candidate)
            .map(|r| r.frequency)
    }

    pub fn dic_mean(&self, truth: &str, candidate: &str, variant: u8) -> Option<&DicSummaryRow> {
        self.dic_summary
            .iter()
            .find(|r| r.truth == truth && r.candidate == candidate && r.variant == variant)
    }
}
