use serde::{Deserialize, Serialize, Serializer};

use crate::abc::rejection::{reject, PosteriorSample, Selection};
use crate::abc::standardize::Standardization;
use crate::error::{Error, Result};
use crate::linalg::ridge_cholesky;
use crate::summary::SummaryVector;
use crate::table::ReferenceTable;

const PENALTY: f64 = 1e-6;
const MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbMethod {
    Count,
    Mnlogistic,
}

fn finite_or_null<S: Serializer>(m: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Option<f64>>> = m
        .iter()
        .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
        .collect();
    rows.serialize(s)
}

/// Posterior model probabilities and pairwise Bayes factors.
///
/// Non-finite Bayes factors (a zero denominator) serialize as `null` and are
/// listed in `flags`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelProbabilities {
    pub method: ProbMethod,
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
    pub accepted: Vec<usize>,
    #[serde(serialize_with = "finite_or_null")]
    pub bayes_factors: Vec<Vec<f64>>,
    pub flags: Vec<String>,
}

fn bayes_factors(labels: &[String], numer: &[f64]) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut flags = Vec::new();
    let k = labels.len();
    let mut bf = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            bf[i][j] = numer[i] / numer[j];
            if numer[j] == 0.0 {
                flags.push(format!(
                    "BF({},{}) undefined: no support for {}",
                    labels[i], labels[j], labels[j]
                ));
            }
        }
    }
    (bf, flags)
}

fn pooled(
    table: &ReferenceTable,
    s0: &SummaryVector,
    rate: f64,
    std: &Standardization,
) -> Result<PosteriorSample> {
    if table.models().len() < 2 {
        return Err(Error::InvalidArgument("model probabilities need at least two models".into()));
    }
    reject(table, s0, rate, Selection::All, std)
}

fn labels(table: &ReferenceTable) -> Vec<String> {
    table.models().iter().map(|m| m.label.clone()).collect()
}

fn counts(table: &ReferenceTable, sample: &PosteriorSample) -> Vec<usize> {
    let mut c = vec![0usize; table.models().len()];
    for r in &sample.rows {
        c[r.model] += 1;
    }
    c
}

/// Proportion of pooled acceptances coming from each model.
pub fn model_probs_count(
    table: &ReferenceTable,
    s0: &SummaryVector,
    rate: f64,
    std: &Standardization,
) -> Result<ModelProbabilities> {
    let sample = pooled(table, s0, rate, std)?;
    let labels = labels(table);
    let accepted = counts(table, &sample);
    let total: usize = accepted.iter().sum();
    if total == 0 {
        return Err(Error::TooFewAcceptances { rate, rows: table.len() });
    }
    let c: Vec<f64> = accepted.iter().map(|&c| c as f64).collect();
    let probs = c.iter().map(|&x| x / total as f64).collect();
    let (bayes_factors, flags) = bayes_factors(&labels, &c);
    Ok(ModelProbabilities {
        method: ProbMethod::Count,
        labels,
        probs,
        accepted,
        bayes_factors,
        flags,
    })
}

/// Weighted multinomial logistic regression of the model label on the
/// standardized deviations `(s - s0)` of the pooled acceptances, evaluated at
/// `s = s0`.
pub fn model_probs_mnlogistic(
    table: &ReferenceTable,
    s0: &SummaryVector,
    rate: f64,
    std: &Standardization,
) -> Result<ModelProbabilities> {
    let sample = pooled(table, s0, rate, std)?;
    let labels = labels(table);
    let accepted = counts(table, &sample);
    let d = std.scales.len();
    let s0v = s0.values();
    let mut x = Vec::with_capacity(sample.len() * d);
    let mut classes = Vec::with_capacity(sample.len());
    let mut weights = Vec::with_capacity(sample.len());
    for r in &sample.rows {
        let pos = table.position(r.row).expect("accepted rows come from the table");
        let s = &table.rows()[pos].stats;
        x.extend((0..d).map(|k| (s[k] - s0v[k]) / std.scales[k]));
        classes.push(r.model);
        weights.push(r.weight);
    }
    let fit = fit_mnlogistic(&classes, labels.len(), &x, d, &weights)?;
    let probs = fit.probabilities_at(&vec![0.0; d]);
    let (bayes_factors, mut flags) = bayes_factors(&labels, &probs);
    if fit.iterations > 25 {
        flags.push(format!("IRLS needed {} iterations", fit.iterations));
    }
    Ok(ModelProbabilities {
        method: ProbMethod::Mnlogistic,
        labels,
        probs,
        accepted,
        bayes_factors,
        flags,
    })
}

/// Fitted multinomial logit. Classes with no weight are excluded from the fit
/// and get probability zero; the first present class is the reference.
#[derive(Clone, Debug)]
pub struct MnLogisticFit {
    pub n_classes: usize,
    pub dim: usize,
    /// Present classes, reference first.
    pub present: Vec<usize>,
    /// `(present.len() - 1) x (dim + 1)` coefficients, intercept first.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl MnLogisticFit {
    pub fn probabilities_at(&self, x: &[f64]) -> Vec<f64> {
        let p = self.dim + 1;
        let mut eta = vec![0.0; self.present.len()];
        for c in 1..self.present.len() {
            let b = &self.coefficients[(c - 1) * p..c * p];
            eta[c] = b[0] + (0..self.dim).map(|k| b[k + 1] * x[k]).sum::<f64>();
        }
        let probs = softmax(&eta);
        let mut out = vec![0.0; self.n_classes];
        for (c, &class) in self.present.iter().enumerate() {
            out[class] = probs[c];
        }
        out
    }
}

fn softmax(eta: &[f64]) -> Vec<f64> {
    let m = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = eta.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Penalized weighted negative log-likelihood.
fn objective(
    beta: &[f64],
    cls: &[usize],
    x: &[f64],
    dim: usize,
    w: &[f64],
    k: usize,
) -> f64 {
    let p = dim + 1;
    let mut nll = 0.0;
    let mut eta = vec![0.0; k];
    for (i, (&c, &wi)) in cls.iter().zip(w).enumerate() {
        if wi == 0.0 {
            continue;
        }
        let xi = &x[i * dim..(i + 1) * dim];
        linear_predictors(beta, xi, p, &mut eta);
        let m = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + eta.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
        nll -= wi * (eta[c] - lse);
    }
    nll + 0.5 * PENALTY * beta.iter().map(|b| b * b).sum::<f64>()
}

#[inline]
fn linear_predictors(beta: &[f64], xi: &[f64], p: usize, eta: &mut [f64]) {
    eta[0] = 0.0;
    for c in 1..eta.len() {
        let b = &beta[(c - 1) * p..c * p];
        eta[c] = b[0] + xi.iter().zip(&b[1..]).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Fit by Newton-Raphson (IRLS) with an L2 penalty of `1e-6` on all
/// coefficients and step halving.
///
/// `x` is row-major `n x dim`; `classes[i] < n_classes`.
pub fn fit_mnlogistic(
    classes: &[usize],
    n_classes: usize,
    x: &[f64],
    dim: usize,
    weights: &[f64],
) -> Result<MnLogisticFit> {
    let n = classes.len();
    if weights.len() != n || x.len() != n * dim {
        return Err(Error::InvalidArgument("inconsistent regression inputs".into()));
    }
    let mut class_weight = vec![0.0; n_classes];
    for (&c, &w) in classes.iter().zip(weights) {
        class_weight[c] += w;
    }
    let present: Vec<usize> = (0..n_classes).filter(|&c| class_weight[c] > 0.0).collect();
    if present.is_empty() {
        return Err(Error::DegenerateWeights);
    }
    let k = present.len();
    let p = dim + 1;
    let q = (k - 1) * p;
    let mut relabel = vec![usize::MAX; n_classes];
    for (i, &c) in present.iter().enumerate() {
        relabel[c] = i;
    }
    // rows of absent classes have zero weight
    let cls: Vec<usize> = classes.iter().map(|&c| relabel[c].min(k - 1)).collect();
    let w: Vec<f64> = classes
        .iter()
        .zip(weights)
        .map(|(&c, &wi)| if relabel[c] == usize::MAX { 0.0 } else { wi })
        .collect();

    let mut beta = vec![0.0; q];
    for c in 1..k {
        beta[(c - 1) * p] = (class_weight[present[c]] / class_weight[present[0]]).ln();
    }
    if q == 0 {
        return Ok(MnLogisticFit {
            n_classes,
            dim,
            present,
            coefficients: beta,
            iterations: 0,
            gradient_norm: 0.0,
        });
    }

    let total_w: f64 = w.iter().sum();
    let tol = 1e-10 * total_w.max(1.0);
    let mut f = objective(&beta, &cls, x, dim, &w, k);
    let mut eta = vec![0.0; k];
    let mut xi_full = vec![0.0; p];
    let mut grad_norm = f64::INFINITY;
    for iter in 1..=MAX_ITER {
        let mut g = vec![0.0; q];
        let mut h = vec![0.0; q * q];
        for (i, (&c, &wi)) in cls.iter().zip(&w).enumerate() {
            if wi == 0.0 {
                continue;
            }
            let xi = &x[i * dim..(i + 1) * dim];
            xi_full[0] = 1.0;
            xi_full[1..].copy_from_slice(xi);
            linear_predictors(&beta, xi, p, &mut eta);
            let pr = softmax(&eta);
            for a in 1..k {
                let resid = pr[a] - if c == a { 1.0 } else { 0.0 };
                for u in 0..p {
                    g[(a - 1) * p + u] += wi * resid * xi_full[u];
                }
                for b in 1..=a {
                    let v = wi * (if a == b { pr[a] } else { 0.0 } - pr[a] * pr[b]);
                    for u in 0..p {
                        let vu = v * xi_full[u];
                        for t in 0..p {
                            h[((a - 1) * p + u) * q + (b - 1) * p + t] += vu * xi_full[t];
                        }
                    }
                }
            }
        }
        for j in 0..q {
            g[j] += PENALTY * beta[j];
            h[j * q + j] += PENALTY;
        }
        // only blocks with b <= a were accumulated
        for r in 0..q {
            for c in r + 1..q {
                h[r * q + c] = h[c * q + r];
            }
        }
        grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if grad_norm < tol {
            return Ok(MnLogisticFit {
                n_classes,
                dim,
                present,
                coefficients: beta,
                iterations: iter - 1,
                gradient_norm: grad_norm,
            });
        }
        let chol = ridge_cholesky(&h, q, 1e-12).ok_or_else(|| Error::NoConvergence {
            iterations: iter,
            gradient_norm: grad_norm,
            coefficients: beta.clone(),
        })?;
        let mut step = g.clone();
        chol.solve(&mut step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b - t * s).collect();
            let ft = objective(&trial, &cls, x, dim, &w, k);
            if ft <= f + 1e-12 * f.abs() {
                let small = step.iter().map(|s| (t * s).abs()).fold(0.0, f64::max) < 1e-12;
                beta = trial;
                f = ft;
                accepted = true;
                if small {
                    return Ok(MnLogisticFit {
                        n_classes,
                        dim,
                        present,
                        coefficients: beta,
                        iterations: iter,
                        gradient_norm: grad_norm,
                    });
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        gradient_norm: grad_norm,
        coefficients: beta,
    })
}
