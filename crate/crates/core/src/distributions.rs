//! Prior distributions.
//!
//! Only the families needed by the built-in models are provided. The
//! uniform, log10-uniform, Gaussian, exponential and inverse-exponential
//! kinds are sampled by inversion of a single uniform variate, so a draw is a
//! deterministic function of that variate; the gamma kinds use rejection
//! sampling.

use std::f64::consts::{LN_10, SQRT_2};

use rand::RngCore;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::params::Transform;
use crate::rng::open_unit;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A validated prior specification.
///
/// JSON form: `{"kind":"Uniform","a":0,"b":15}`,
/// `{"kind":"Log10Uniform","a":0,"b":1.5}`, `{"kind":"Gaussian","mean":2,"sd":10}`,
/// `{"kind":"Exponential","rate":1}`, `{"kind":"InverseExponential","rate":1}`,
/// `{"kind":"Gamma","shape":2,"rate":0.5}`, `{"kind":"InverseGamma","shape":11,"rate":92.885}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", try_from = "RawPrior", into = "RawPrior")]
pub enum PriorSpec {
    Uniform { a: f64, b: f64 },
    /// Uniform on the base-10 exponent: `x = 10^y`, `y ~ Uniform(a, b)`.
    Log10Uniform { a: f64, b: f64 },
    Gaussian { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    /// Law of `1/X` with `X ~ Exponential(rate)`, i.e. `InverseGamma(1, rate)`.
    InverseExponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, rate: f64 },
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum RawPrior {
    Uniform { a: f64, b: f64 },
    Log10Uniform { a: f64, b: f64 },
    Gaussian { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    InverseExponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, rate: f64 },
}

impl TryFrom<RawPrior> for PriorSpec {
    type Error = Error;
    fn try_from(raw: RawPrior) -> Result<Self> {
        let p = match raw {
            RawPrior::Uniform { a, b } => PriorSpec::Uniform { a, b },
            RawPrior::Log10Uniform { a, b } => PriorSpec::Log10Uniform { a, b },
            RawPrior::Gaussian { mean, sd } => PriorSpec::Gaussian { mean, sd },
            RawPrior::Exponential { rate } => PriorSpec::Exponential { rate },
            RawPrior::InverseExponential { rate } => PriorSpec::InverseExponential { rate },
            RawPrior::Gamma { shape, rate } => PriorSpec::Gamma { shape, rate },
            RawPrior::InverseGamma { shape, rate } => PriorSpec::InverseGamma { shape, rate },
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<PriorSpec> for RawPrior {
    fn from(p: PriorSpec) -> Self {
        match p {
            PriorSpec::Uniform { a, b } => RawPrior::Uniform { a, b },
            PriorSpec::Log10Uniform { a, b } => RawPrior::Log10Uniform { a, b },
            PriorSpec::Gaussian { mean, sd } => RawPrior::Gaussian { mean, sd },
            PriorSpec::Exponential { rate } => RawPrior::Exponential { rate },
            PriorSpec::InverseExponential { rate } => RawPrior::InverseExponential { rate },
            PriorSpec::Gamma { shape, rate } => RawPrior::Gamma { shape, rate },
            PriorSpec::InverseGamma { shape, rate } => RawPrior::InverseGamma { shape, rate },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPrior(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Standard normal quantile via the inverse complementary error function.
#[inline]
pub fn std_normal_quantile(u: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * u)
}

#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

impl PriorSpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let p = PriorSpec::Uniform { a, b };
        p.validate().map(|_| p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorSpec::Uniform { a, b } | PriorSpec::Log10Uniform { a, b } => {
                if a.is_finite() && b.is_finite() && b > a {
                    Ok(())
                } else {
                    Err(Error::InvalidPrior(format!("need finite a < b, got ({a}, {b})")))
                }
            }
            PriorSpec::Gaussian { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidPrior(format!("mean must be finite, got {mean}")));
                }
                positive("sd", sd)
            }
            PriorSpec::Exponential { rate } | PriorSpec::InverseExponential { rate } => {
                positive("rate", rate)
            }
            PriorSpec::Gamma { shape, rate } | PriorSpec::InverseGamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)
            }
        }
    }

    /// Transform mapping the support onto the real line.
    pub fn natural_transform(&self) -> Transform {
        match *self {
            PriorSpec::Uniform { a, b } => Transform::Logit { a, b },
            PriorSpec::Log10Uniform { a, b } => Transform::Logit {
                a: 10f64.powf(a),
                b: 10f64.powf(b),
            },
            PriorSpec::Gaussian { .. } => Transform::Identity,
            _ => Transform::Log,
        }
    }

    /// Whether every draw is strictly positive.
    pub fn is_positive(&self) -> bool {
        match *self {
            PriorSpec::Uniform { a, .. } => a >= 0.0,
            PriorSpec::Gaussian { .. } => false,
            _ => true,
        }
    }

    /// Inverse CDF at `u` for the kinds sampled by inversion; `None` for the
    /// gamma kinds.
    pub fn quantile_from_uniform(&self, u: f64) -> Option<f64> {
        match *self {
            PriorSpec::Uniform { a, b } => Some(a + (b - a) * u),
            PriorSpec::Log10Uniform { a, b } => Some(10f64.powf(a + (b - a) * u)),
            PriorSpec::Gaussian { mean, sd } => Some(mean + sd * std_normal_quantile(u)),
            PriorSpec::Exponential { rate } => Some(-(-u).ln_1p() / rate),
            // X = -ln(u)/rate is an Exponential(rate) draw and the value is 1/X.
            PriorSpec::InverseExponential { rate } => Some(1.0 / (-u.ln() / rate)),
            PriorSpec::Gamma { .. } | PriorSpec::InverseGamma { .. } => None,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PriorSpec::Gamma { shape, rate } => gamma_sampler(shape, rate).sample(rng),
            PriorSpec::InverseGamma { shape, rate } => 1.0 / gamma_sampler(shape, rate).sample(rng),
            _ => {
                let u = open_unit(rng);
                self.quantile_from_uniform(u)
                    .expect("inversion kinds always have a quantile")
            }
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NEG_INFINITY;
        }
        match *self {
            PriorSpec::Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    -(b - a).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            PriorSpec::Log10Uniform { a, b } => {
                if x > 0.0 && (a..=b).contains(&x.log10()) {
                    -((b - a) * x * LN_10).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            PriorSpec::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - LN_SQRT_2PI
            }
            PriorSpec::Exponential { rate } => {
                if x >= 0.0 {
                    rate.ln() - rate * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            PriorSpec::InverseExponential { rate } => {
                PriorSpec::InverseGamma { shape: 1.0, rate }.log_density(x)
            }
            PriorSpec::Gamma { shape, rate } => {
                if x > 0.0 {
                    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            PriorSpec::InverseGamma { shape, rate } => {
                if x > 0.0 {
                    shape * rate.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - rate / x
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            PriorSpec::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            PriorSpec::Log10Uniform { a, b } => {
                if x <= 0.0 {
                    0.0
                } else {
                    ((x.log10() - a) / (b - a)).clamp(0.0, 1.0)
                }
            }
            PriorSpec::Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
            PriorSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            PriorSpec::InverseExponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-rate / x).exp()
                }
            }
            PriorSpec::Gamma { shape, rate } => gamma_cdf(shape, rate, x),
            PriorSpec::InverseGamma { shape, rate } => inverse_gamma_cdf(shape, rate, x),
        }
    }
}

fn gamma_sampler(shape: f64, rate: f64) -> rand_distr::Gamma<f64> {
    rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated gamma parameters")
}

/// `P(X <= x)` for `X ~ Gamma(shape, rate)`.
pub fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(shape, rate * x)
    }
}

/// `P(X <= x)` for `X ~ InverseGamma(shape, rate)`, i.e. the regularized upper
/// incomplete gamma function `Q(shape, rate / x)`. Returns 0 for `x <= 0`.
pub fn inverse_gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = rate / x;
    if z == 0.0 {
        1.0
    } else {
        gamma_ur(shape, z)
    }
}

/// Quantile of `Gamma(shape, rate)` by bisection on the CDF.
pub fn gamma_quantile(shape: f64, rate: f64, p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must lie in (0, 1)");
    let mut hi = (shape / rate).max(1.0 / rate);
    while gamma_cdf(shape, rate, hi) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_cdf(shape, rate, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Fit a gamma prior from a target mean and a central interval.
///
/// The ratio `upper / lower` of a gamma's central quantiles depends only on
/// the shape, so the shape is found by root finding on that ratio, and the
/// rate is then set so that `shape / rate == mean`.
pub fn fit_gamma(mean: f64, lower: f64, upper: f64, level: f64) -> Result<PriorSpec> {
    if !(mean > 0.0 && lower > 0.0 && upper > lower && level > 0.0 && level < 1.0) {
        return Err(Error::InvalidPrior(format!(
            "cannot fit gamma to mean {mean} with interval ({lower}, {upper}) at level {level}"
        )));
    }
    let tail = 0.5 * (1.0 - level);
    let target = (upper / lower).ln();
    // log quantile ratio, decreasing in shape
    let log_ratio = |shape: f64| {
        (gamma_quantile(shape, 1.0, 1.0 - tail) / gamma_quantile(shape, 1.0, tail)).ln()
    };
    let (mut lo, mut hi) = (1e-2f64.ln(), 1e7f64.ln());
    if log_ratio(lo.exp()) < target || log_ratio(hi.exp()) > target {
        return Err(Error::InvalidPrior(format!(
            "interval ratio {} is outside the reachable range",
            upper / lower
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if log_ratio(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shape = (0.5 * (lo + hi)).exp();
    Ok(PriorSpec::Gamma {
        shape,
        rate: shape / mean,
    })
}
