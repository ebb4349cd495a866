//! Likelihood-free inference by approximate Bayesian computation, with model
//! choice through deviance information criteria estimated from posterior
//! predictive simulation.

pub mod abc;
pub mod coalescent;
pub mod dic;
pub mod distributions;
pub mod error;
mod linalg;
pub mod model;
pub mod par;
pub mod params;
pub mod rng;
pub mod summary;
pub mod table;
pub mod toy;

pub use error::{Error, Result};
pub use model::{ModelSpec, Simulator};
pub use params::{ParamDef, ParamVector, Record, Transform};
pub use summary::{names, Names, SummaryVector};
pub use table::{build_reference_table, ReferenceTable};
