//! Shot-level counting data: synthetic sampling, moment estimators with
//! bootstrap intervals, and the analysis pipeline.

mod analyze;
mod dataset;
mod estimate;
mod sampling;

pub use analyze::{analyze, analyze_with, AnalysisOptions, AnalysisReport};
pub use dataset::{sidecar_path, CountDataset, CountRecord, Histogram, Metadata, CSV_HEADER};
pub use estimate::{
    bootstrap_ci, estimate_moments, estimate_moments_with, plug_in_moments, thermal_check,
    thermal_check_from, EstimateWithCI, MomentEstimates, ThermalCheck, DEFAULT_BOOTSTRAP_SEED,
    DEFAULT_REPLICATES, MIN_REPLICATES,
};
pub use sampling::{sample_counts, SAMPLING_CHUNK};
