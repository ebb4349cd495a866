//! Inference for one observed summary vector against a shared table.

use abcdic_core::abc::{
    adjust_loclinear, model_probs_count, model_probs_mnlogistic, reject, ModelProbabilities,
    PosteriorSample, ProbMethod, Selection, Standardization,
};
use abcdic_core::dic::{
    dic1, dic2, point_estimate, predictive_check, Aggregation, DicReport, KernelConfig,
    PredictiveCheck,
};
use abcdic_core::rng::child_seed;
use abcdic_core::{ModelSpec, ParamVector, ReferenceTable, SummaryVector};
use serde::Serialize;

use crate::config::Adjust;
use crate::error::CliResult;

/// What to compute for each observation.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub rate: f64,
    pub adjust: Adjust,
    pub dic_variants: Vec<u8>,
    pub dic_n: usize,
    pub dic_m: usize,
    pub dic_n_per_draw: usize,
    pub predictive_n: Option<usize>,
    pub prob_methods: Vec<ProbMethod>,
    pub keep_posterior: bool,
}

/// The table, its standardization and the candidate models, in table order.
pub struct Context<'a> {
    pub table: &'a ReferenceTable,
    pub std: &'a Standardization,
    pub models: &'a [ModelSpec],
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateResult {
    pub label: String,
    pub accepted: usize,
    pub tolerance: f64,
    pub posterior_mean: ParamVector,
    pub dic: Vec<DicReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictive: Option<PredictiveCheck>,
    #[serde(skip)]
    pub posterior: Option<PosteriorSample>,
}

impl CandidateResult {
    pub fn dic(&self, variant: u8) -> Option<&DicReport> {
        self.dic.iter().find(|d| d.variant == variant)
    }
}

/// Winner(s) of one criterion; more than one label is an exact tie.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selected {
    pub criterion: String,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ObservationResult {
    pub replicate: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<String>,
    pub seed: u64,
    pub observed: SummaryVector,
    /// Pooled tolerance at the acceptance rate, the kernel bandwidth.
    pub epsilon: f64,
    pub candidates: Vec<CandidateResult>,
    pub model_probs: Vec<ModelProbabilities>,
    pub selected: Vec<Selected>,
    /// Non-fatal failures (a model-probability fit that did not converge).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl ObservationResult {
    pub fn candidate(&self, label: &str) -> Option<&CandidateResult> {
        self.candidates.iter().find(|c| c.label == label)
    }

    pub fn probs(&self, method: ProbMethod) -> Option<&ModelProbabilities> {
        self.model_probs.iter().find(|p| p.method == method)
    }

    pub fn winners(&self, criterion: &str) -> Option<&[String]> {
        self.selected.iter().find(|s| s.criterion == criterion).map(|s| s.labels.as_slice())
    }
}

pub fn dic_criterion(variant: u8) -> String {
    format!("dic{variant}")
}

pub fn prob_criterion(method: ProbMethod) -> &'static str {
    match method {
        ProbMethod::Count => "count",
        ProbMethod::Mnlogistic => "mnlogistic",
    }
}

fn arg_best(labels: &[&str], values: &[f64], lower_is_better: bool) -> Vec<String> {
    let best = values
        .iter()
        .copied()
        .fold(None, |acc: Option<f64>, v| match acc {
            None => Some(v),
            Some(a) if (lower_is_better && v < a) || (!lower_is_better && v > a) => Some(v),
            keep => keep,
        });
    match best {
        Some(b) => labels
            .iter()
            .zip(values)
            .filter(|(_, v)| **v == b)
            .map(|(l, _)| l.to_string())
            .collect(),
        None => Vec::new(),
    }
}

/// Per-candidate streams: candidate `j` draws its DIC variant 1, variant 2
/// and predictive simulations from children 1, 2 and 3 of
/// `child_seed(seed, j)`.
pub fn analyze(
    ctx: &Context<'_>,
    plan: &Plan,
    observed: SummaryVector,
    seed: u64,
    aggregation: Aggregation,
    replicate: usize,
    truth: Option<String>,
) -> CliResult<ObservationResult> {
    let pooled = reject(ctx.table, &observed, plan.rate, Selection::All, ctx.std)?;
    let epsilon = pooled.tolerance;
    let kernel = if plan.dic_variants.is_empty() {
        None
    } else {
        Some(KernelConfig::new(epsilon, ctx.std)?)
    };

    let mut candidates = Vec::with_capacity(ctx.models.len());
    for (j, model) in ctx.models.iter().enumerate() {
        let stream = child_seed(seed, j as u64);
        let mut sample = reject(ctx.table, &observed, plan.rate, Selection::Model(model.label()), ctx.std)?;
        if plan.adjust == Adjust::Loclinear {
            sample = adjust_loclinear(&sample, ctx.table)?;
        }
        let mut dic = Vec::new();
        if let Some(kernel) = &kernel {
            for &v in &plan.dic_variants {
                dic.push(match v {
                    1 => dic1(&sample, model, plan.dic_n, kernel, aggregation, child_seed(stream, 1))?,
                    _ => dic2(
                        &sample,
                        model,
                        plan.dic_m,
                        plan.dic_n_per_draw,
                        kernel,
                        aggregation,
                        child_seed(stream, 2),
                    )?,
                });
            }
        }
        let predictive = match plan.predictive_n {
            Some(n) => Some(predictive_check(&sample, model, n, child_seed(stream, 3))?),
            None => None,
        };
        candidates.push(CandidateResult {
            label: model.label().to_string(),
            accepted: sample.len(),
            tolerance: sample.tolerance,
            posterior_mean: point_estimate(&sample)?,
            dic,
            predictive,
            posterior: plan.keep_posterior.then_some(sample),
        });
    }

    let labels: Vec<&str> = ctx.models.iter().map(|m| m.label()).collect();
    let mut selected = Vec::new();
    for &v in &plan.dic_variants {
        let values: Vec<f64> = candidates.iter().map(|c| c.dic(v).expect("computed").dic).collect();
        selected.push(Selected {
            criterion: dic_criterion(v),
            labels: arg_best(&labels, &values, true),
        });
    }

    let mut model_probs = Vec::new();
    let mut errors = Vec::new();
    if ctx.models.len() > 1 {
        for &method in &plan.prob_methods {
            let fit = match method {
                ProbMethod::Count => model_probs_count(ctx.table, &observed, plan.rate, ctx.std),
                ProbMethod::Mnlogistic => model_probs_mnlogistic(ctx.table, &observed, plan.rate, ctx.std),
            };
            match fit {
                Ok(p) => {
                    selected.push(Selected {
                        criterion: prob_criterion(method).to_string(),
                        labels: arg_best(&labels, &p.probs, false),
                    });
                    model_probs.push(p);
                }
                Err(e) => errors.push(format!("{}: {e}", prob_criterion(method))),
            }
        }
    }

    Ok(ObservationResult {
        replicate,
        truth,
        seed,
        observed,
        epsilon,
        candidates,
        model_probs,
        selected,
        errors,
    })
}
