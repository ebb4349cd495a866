use serde::Serialize;

use crate::abc::PosteriorSample;
use crate::dic::kernel::KernelConfig;
use crate::dic::report::{Aggregation, DicReport};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::par;
use crate::params::ParamVector;
use crate::rng::{child_seed, open_unit, rng_from_seed};
use crate::summary::{check_names, Names};

/// Weighted mean of the adjusted parameters on the transformed scale,
/// mapped back to the support.
pub fn point_estimate(sample: &PosteriorSample) -> Result<ParamVector> {
    let layout = sample.single_layout()?;
    let total: f64 = sample.rows.iter().map(|r| r.weight).sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    let values = layout
        .transforms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let m: f64 = sample
                .rows
                .iter()
                .map(|r| r.weight / total * t.forward(r.theta_adj[k]))
                .sum();
            t.inverse(m)
        })
        .collect();
    ParamVector::new(layout.param_names.clone(), layout.transforms.clone(), values)
}

/// Weighted resampling with replacement by inversion of the cumulative weights.
struct Resampler {
    cumulative: Vec<f64>,
}

impl Resampler {
    fn new(sample: &PosteriorSample) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = sample
            .rows
            .iter()
            .map(|r| {
                acc += r.weight;
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::DegenerateWeights);
        }
        Ok(Resampler { cumulative })
    }

    fn draw(&self, seed: u64) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = open_unit(&mut rng_from_seed(seed)) * total;
        // first index whose cumulative weight exceeds u; zero-weight rows are never chosen
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

fn check_model(sample: &PosteriorSample, model: &ModelSpec) -> Result<()> {
    let layout = sample.single_layout()?;
    check_names(&layout.param_names, model.param_names())
        .map_err(|_| Error::InvalidArgument(format!(
            "posterior sample of {} does not match model {}",
            layout.label,
            model.label()
        )))?;
    check_names(sample.observed.names(), model.stat_names())
}

fn check_kernel(sample: &PosteriorSample, kernel: &KernelConfig) -> Result<()> {
    check_names(&kernel.names, sample.observed.names())
}

/// `-2 log K` of `n` predictive simulations, `theta_j` resampled from the
/// posterior (or fixed to `fixed`).
fn level1(
    sample: &PosteriorSample,
    model: &ModelSpec,
    n: usize,
    kernel: &KernelConfig,
    seed: u64,
    fixed: Option<&ParamVector>,
) -> Result<Vec<f64>> {
    let resampler = Resampler::new(sample)?;
    let s0 = sample.observed.values();
    par::try_map_indexed(n, |j| {
        let draw_seed = child_seed(seed, j as u64);
        let theta = match fixed {
            Some(p) => p.values(),
            None => &sample.rows[resampler.draw(child_seed(draw_seed, 0))].theta_adj[..],
        };
        let s = model.simulate(theta, child_seed(draw_seed, 1))?;
        Ok(kernel.neg2_log(s.values(), s0))
    })
}

/// Expected deviance, variant 1: aggregate of `-2 log K_eps(s^j - s0)` over
/// `n` posterior predictive simulations.
pub fn dbar1(
    sample: &PosteriorSample,
    model: &ModelSpec,
    n: usize,
    kernel: &KernelConfig,
    agg: Aggregation,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    check_model(sample, model)?;
    check_kernel(sample, kernel)?;
    let mut v = level1(sample, model, n, kernel, seed, None)?;
    Ok(agg.apply(&mut v))
}

/// DIC variant 1. The point-estimate deviance reuses the simulation seeds of
/// the expected deviance with every draw set to the posterior mean.
pub fn dic1(
    sample: &PosteriorSample,
    model: &ModelSpec,
    n: usize,
    kernel: &KernelConfig,
    agg: Aggregation,
    seed: u64,
) -> Result<DicReport> {
    let d_bar = dbar1(sample, model, n, kernel, agg, seed)?;
    let theta_hat = point_estimate(sample)?;
    let mut v = level1(sample, model, n, kernel, seed, Some(&theta_hat))?;
    let d_hat = agg.apply(&mut v);
    Ok(DicReport::new(1, d_bar, d_hat, agg, n, None, kernel.epsilon, theta_hat))
}

fn inner_seed(outer: u64) -> u64 {
    child_seed(outer, 1)
}

fn neg2_log_mean_kernel(values: &[f64]) -> f64 {
    // -2 log( (1/n) sum exp(-v/2) ), computed stably
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = values.iter().map(|v| (-(v - m) * 0.5).exp()).sum();
    m - 2.0 * (s / values.len() as f64).ln()
}

fn group(
    model: &ModelSpec,
    theta: &[f64],
    n: usize,
    kernel: &KernelConfig,
    s0: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    (0..n)
        .map(|j| {
            let s = model.simulate(theta, child_seed(seed, j as u64))?;
            Ok(kernel.neg2_log(s.values(), s0))
        })
        .collect()
}

/// `-2 log K` for `m` posterior draws times `n` simulations each, grouped by draw.
pub fn grouped_deviances(
    sample: &PosteriorSample,
    model: &ModelSpec,
    m: usize,
    n: usize,
    kernel: &KernelConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and n must be at least 1".into()));
    }
    check_model(sample, model)?;
    check_kernel(sample, kernel)?;
    let resampler = Resampler::new(sample)?;
    let s0 = sample.observed.values();
    par::try_map_indexed(m, |i| {
        let outer = child_seed(seed, i as u64);
        let theta = &sample.rows[resampler.draw(child_seed(outer, 0))].theta_adj;
        group(model, theta, n, kernel, s0, inner_seed(outer))
    })
}

/// Expected deviance, variant 2: aggregate over `m` posterior draws of
/// `-2 log((1/n) sum_j K_eps(s^j_i - s0))`.
pub fn dbar2(
    sample: &PosteriorSample,
    model: &ModelSpec,
    m: usize,
    n: usize,
    kernel: &KernelConfig,
    agg: Aggregation,
    seed: u64,
) -> Result<f64> {
    let groups = grouped_deviances(sample, model, m, n, kernel, seed)?;
    let mut per_draw: Vec<f64> = groups.iter().map(|g| neg2_log_mean_kernel(g)).collect();
    Ok(agg.apply(&mut per_draw))
}

/// DIC variant 2. The point-estimate deviance uses `n` simulations at the
/// posterior mean with the inner seeds of the first posterior draw.
pub fn dic2(
    sample: &PosteriorSample,
    model: &ModelSpec,
    m: usize,
    n: usize,
    kernel: &KernelConfig,
    agg: Aggregation,
    seed: u64,
) -> Result<DicReport> {
    let d_bar = dbar2(sample, model, m, n, kernel, agg, seed)?;
    let theta_hat = point_estimate(sample)?;
    let s0 = sample.observed.values();
    let inner = inner_seed(child_seed(seed, 0));
    // the n simulations at the point estimate are independent; spread them too
    let v = par::try_map_indexed(n, |j| {
        let s = model.simulate(theta_hat.values(), child_seed(inner, j as u64))?;
        Ok(kernel.neg2_log(s.values(), s0))
    })?;
    let d_hat = neg2_log_mean_kernel(&v);
    Ok(DicReport::new(2, d_bar, d_hat, agg, n, Some(m), kernel.epsilon, theta_hat))
}

/// `n` posterior predictive statistic vectors (same draws as [`dbar1`] with
/// the same seed).
pub fn predictive_draws(
    sample: &PosteriorSample,
    model: &ModelSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_model(sample, model)?;
    let resampler = Resampler::new(sample)?;
    par::try_map_indexed(n, |j| {
        let draw_seed = child_seed(seed, j as u64);
        let theta = &sample.rows[resampler.draw(child_seed(draw_seed, 0))].theta_adj;
        Ok(model.simulate(theta, child_seed(draw_seed, 1))?.values().to_vec())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictiveCheckRow {
    pub stat: String,
    pub observed: f64,
    /// Mid-rank quantile of the observed value among the predictive draws.
    pub quantile: f64,
    /// `2 min(q, 1 - q)`.
    pub tail_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictiveCheck {
    pub n: usize,
    pub rows: Vec<PredictiveCheckRow>,
}

impl PredictiveCheck {
    pub fn from_draws(names: &Names, observed: &[f64], draws: &[Vec<f64>]) -> Self {
        let n = draws.len();
        let rows = names
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let obs = observed[k];
                let (mut below, mut ties) = (0usize, 0usize);
                for d in draws {
                    if d[k] < obs {
                        below += 1;
                    } else if d[k] == obs {
                        ties += 1;
                    }
                }
                let q = (below as f64 + 0.5 * ties as f64) / n as f64;
                PredictiveCheckRow {
                    stat: name.clone(),
                    observed: obs,
                    quantile: q,
                    tail_prob: (2.0 * q.min(1.0 - q)).clamp(0.0, 1.0),
                }
            })
            .collect();
        PredictiveCheck { n, rows }
    }

    pub fn get(&self, stat: &str) -> Option<&PredictiveCheckRow> {
        self.rows.iter().find(|r| r.stat == stat)
    }
}

/// Where each observed statistic falls in its posterior predictive distribution.
pub fn predictive_check(
    sample: &PosteriorSample,
    model: &ModelSpec,
    n: usize,
    seed: u64,
) -> Result<PredictiveCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let draws = predictive_draws(sample, model, n, seed)?;
    Ok(PredictiveCheck::from_draws(
        sample.observed.names(),
        sample.observed.values(),
        &draws,
    ))
}
