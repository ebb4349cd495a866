//! Deviance information criteria for ABC posteriors.
//!
//! The surrogate likelihood of the observed statistics given simulated ones
//! is a product Gaussian kernel with a common bandwidth `epsilon` on the
//! standardized scale. Two deviances are estimated by posterior predictive
//! simulation from the (adjusted) accepted parameters:
//!
//! * variant 1 averages `-2 log K` over predictive simulations;
//! * variant 2 averages, over posterior draws, `-2 log` of the Monte Carlo
//!   mean of `K` over simulations at that draw.
//!
//! Both use the posterior mean on the transformed scale as point estimate,
//! and simulate the point-estimate deviance with the same seeds as the
//! expected deviance (common random numbers).

mod kernel;
mod predictive;
mod report;

pub use kernel::{neg2_log_kernel, KernelConfig};
pub use predictive::{
    dbar1, dbar2, dic1, dic2, grouped_deviances, point_estimate, predictive_check,
    predictive_draws, PredictiveCheck, PredictiveCheckRow,
};
pub use report::{Aggregation, DicReport};
