use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid summary vector: {0}")]
    InvalidSummary(String),

    #[error("statistic names do not match: expected {expected:?}, found {found:?}")]
    NameMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("simulation of row {row} (seed {seed:#018x}) failed: {source}")]
    Row {
        row: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("no common ancestor possible: {0}")]
    NoCommonAncestor(String),

    #[error("empty table")]
    EmptyTable,

    #[error("too few acceptances: rate {rate} over {rows} rows accepts fewer than 2")]
    TooFewAcceptances { rate: f64, rows: usize },

    #[error(
        "regression needs more accepted rows than regressors ({rows} rows, {regressors} regressors); \
         try a larger acceptance rate"
    )]
    TooFewRowsForRegression { rows: usize, regressors: usize },

    #[error("weights are all zero")]
    DegenerateWeights,

    #[error("zero variance in data")]
    ZeroVariance,

    #[error(
        "IRLS did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
        coefficients: Vec<f64>,
    },

    #[error("statistic {0} is undefined at every locus")]
    AllAbsent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
