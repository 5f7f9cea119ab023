//! Contamination, batch splitting and mean estimators for sets of gradient samples.

mod batches;
mod bounds;
mod estimators;
mod sample;

pub use batches::{contaminate, corruption_count, split_batches, CorruptionSpec};
pub use bounds::{estimation_error_bounds, EstimationSetting};
pub use estimators::{
    coordinate_robust_mean, naive_mean, naive_mean_columns, robust_keep_count, robust_mean_columns,
};
pub use sample::{Columns, SampleSet, SparseVector};
