//! Rejection sampling, regression adjustment and model probabilities.

mod adjust;
mod modelprob;
mod rejection;
mod standardize;

pub use adjust::adjust_loclinear;
pub use modelprob::{
    fit_mnlogistic, model_probs_count, model_probs_mnlogistic, MnLogisticFit, ModelProbabilities,
    ProbMethod,
};
pub use rejection::{epanechnikov, reject, AcceptedRow, PosteriorSample, Selection};
pub use standardize::{
    distance, mad_scale, standardize, standardize_model, ScaleKind, ScaleSource, Standardization,
};
