//! Gaussian and Laplace toy models summarized by four sample moments.
//!
//! Both models see only `(mean, sd, skewness, kurtosis)` of a sample of known
//! size. Under the Gaussian model with the priors used here, the posterior of
//! the variance given the full sample is available in closed form, which makes
//! the pair a useful test bed for approximate inference.

use std::sync::{Arc, LazyLock};

use crate::distributions::{inverse_gamma_cdf, std_normal_quantile, PriorSpec};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Simulator};
use crate::params::ParamDef;
use crate::rng::{open_unit, rng_from_seed};
use crate::summary::{names, Names, SummaryVector};

/// Sample size of the toy observation.
pub const SAMPLE_SIZE: usize = 20;

/// Location of the Laplace model (fixed, not estimated).
pub const LAPLACE_LOCATION: f64 = 3.0;

/// The canned toy observation `(mean, sd, skewness, kurtosis)`.
pub const OBSERVED: [f64; 4] = [2.00, 3.11, -0.78, 0.14];

const MIN_SIGMA: f64 = 1e-12;

static STAT_NAMES: LazyLock<Names> =
    LazyLock::new(|| names(["mean", "sd", "skewness", "kurtosis"]));

pub fn stat_names() -> Names {
    STAT_NAMES.clone()
}

pub fn observed() -> SummaryVector {
    SummaryVector::new(stat_names(), OBSERVED.to_vec()).expect("finite fixture")
}

/// Mean, sd (n−1 divisor), skewness `m3/m2^1.5` and excess kurtosis
/// `m4/m2² − 3`, the latter two from n-divisor central moments.
pub fn four_moments(data: &[f64]) -> Result<SummaryVector> {
    let n = data.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "four moments need at least 4 values, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = data.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in data {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    // relative guard: a constant sample can leave rounding residue in m2
    if !(m2 > 0.0) || m2.sqrt() <= 1e-14 * mean.abs() * nf.sqrt() {
        return Err(Error::ZeroVariance);
    }
    let sd = (m2 / (nf - 1.0)).sqrt();
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2) - 3.0;
    SummaryVector::new(stat_names(), vec![mean, sd, skew, kurt])
}

fn gaussian_sample(mu: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| mu + sigma * std_normal_quantile(open_unit(&mut rng)))
        .collect()
}

/// Inverse CDF of the Laplace law with the given location and rate.
pub fn laplace_quantile(location: f64, rate: f64, u: f64) -> f64 {
    let c = u - 0.5;
    location - c.signum() * (1.0 - 2.0 * c.abs()).ln() / rate
}

fn laplace_sample(rate: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| laplace_quantile(LAPLACE_LOCATION, rate, open_unit(&mut rng)))
        .collect()
}

/// Four moments of `n` Gaussian draws (inverse-CDF sampling).
pub fn simulate_gaussian(mu: f64, sigma: f64, n: usize, seed: u64) -> Result<SummaryVector> {
    if !mu.is_finite() || !(sigma >= MIN_SIGMA) || !sigma.is_finite() {
        return Err(Error::InvalidParam(format!(
            "gaussian needs finite mu and sigma >= {MIN_SIGMA:e}, got mu={mu}, sigma={sigma}"
        )));
    }
    four_moments(&gaussian_sample(mu, sigma, n, seed))
}

/// Four moments of `n` Laplace draws with location 3 and the given rate.
pub fn simulate_laplace(rate: f64, n: usize, seed: u64) -> Result<SummaryVector> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParam(format!("laplace rate must be positive, got {rate}")));
    }
    four_moments(&laplace_sample(rate, n, seed))
}

/// Parameters `(mu, sigma2)`.
#[derive(Clone, Debug)]
pub struct GaussianSimulator {
    pub n: usize,
}

impl Simulator for GaussianSimulator {
    fn stat_names(&self) -> &Names {
        &STAT_NAMES
    }

    fn simulate(&self, params: &[f64], seed: u64) -> Result<SummaryVector> {
        simulate_gaussian(params[0], params[1].sqrt(), self.n, seed)
    }
}

/// Parameter `(lambda)`.
#[derive(Clone, Debug)]
pub struct LaplaceSimulator {
    pub n: usize,
}

impl Simulator for LaplaceSimulator {
    fn stat_names(&self) -> &Names {
        &STAT_NAMES
    }

    fn simulate(&self, params: &[f64], seed: u64) -> Result<SummaryVector> {
        simulate_laplace(params[0], self.n, seed)
    }
}

pub fn default_gaussian_params() -> Vec<ParamDef> {
    vec![
        ParamDef::new("mu", PriorSpec::Gaussian { mean: 2.0, sd: 10.0 }),
        // prior stated on sigma, recorded as the variance
        ParamDef::squared("sigma2", PriorSpec::InverseExponential { rate: 1.0 }),
    ]
}

pub fn default_laplace_params() -> Vec<ParamDef> {
    vec![ParamDef::new("lambda", PriorSpec::Exponential { rate: 1.0 })]
}

pub fn gaussian_model_with(params: Vec<ParamDef>, n: usize) -> Result<ModelSpec> {
    if params.len() != 2 {
        return Err(Error::InvalidParam("gaussian model takes (mu, sigma2)".into()));
    }
    ModelSpec::new("toy.gaussian", params, Arc::new(GaussianSimulator { n }))
}

pub fn laplace_model_with(params: Vec<ParamDef>, n: usize) -> Result<ModelSpec> {
    if params.len() != 1 {
        return Err(Error::InvalidParam("laplace model takes (lambda)".into()));
    }
    ModelSpec::new("toy.laplace", params, Arc::new(LaplaceSimulator { n }))
}

pub fn gaussian_model() -> ModelSpec {
    gaussian_model_with(default_gaussian_params(), SAMPLE_SIZE).expect("valid defaults")
}

pub fn laplace_model() -> ModelSpec {
    laplace_model_with(default_laplace_params(), SAMPLE_SIZE).expect("valid defaults")
}

/// Shape and rate of the exact posterior of `sigma2` given the sample
/// variance `v0sq` (n = 20).
pub fn exact_sigma2_posterior(v0sq: f64) -> (f64, f64) {
    (11.0, 1.0 + 9.5 * v0sq)
}

pub fn exact_sigma2_posterior_cdf(v0sq: f64, x: f64) -> Result<f64> {
    if !(v0sq > 0.0) || !v0sq.is_finite() {
        return Err(Error::InvalidArgument(format!("v0sq must be positive, got {v0sq}")));
    }
    let (shape, rate) = exact_sigma2_posterior(v0sq);
    Ok(inverse_gamma_cdf(shape, rate, x))
}
