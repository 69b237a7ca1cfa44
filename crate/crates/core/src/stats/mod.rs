//! Normalized densities, distribution distances and Metropolis sampling.

pub mod compare;
pub mod density;
pub mod sampler;

pub use compare::{compare, ComparisonReport};
pub use density::{normalize, normalize_log, DensityProfile};
pub use sampler::{observable_average, sample_metropolis, ChainConfig, Ensemble, Estimate, SampleSet};
