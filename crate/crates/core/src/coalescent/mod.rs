//! Coalescent simulation under infinite sites and the population-genetic
//! summaries computed from it.
//!
//! Time runs backward in units of `2 N0` generations; a pair of lineages in a
//! deme of relative size `nu` coalesces at rate `1/nu`, and mutations fall at
//! rate `theta / 2` per lineage, so that under constant size `E[pi] = theta`
//! and `E[S] = theta * sum_{k<n} 1/k`.

mod demography;
mod genealogy;
mod locus;
mod models;
mod stats;

pub use demography::Demography;
pub use genealogy::{simulate_genealogy, Genealogy, SampleConfig};
pub use locus::{drop_mutation_counts, drop_mutations, LocusData};
pub use models::{coal_model, coal_model_with, CoalModel, CoalescentSimulator};
pub use stats::{
    compute_stats, multi_locus_summary, popgen_names, summarize, AllAbsent, PopGenStats,
    TajimaConstants,
};
