//! Statistics over trial and preference datasets: seed filtering,
//! cooperation rates, choice proportions, percentile-bootstrap intervals,
//! layer summaries and path gradients.
//!
//! Every bootstrap draws from a stream keyed by the statistic's name, so a
//! report is identical whether its parts are computed serially or in
//! parallel.

mod bootstrap;
mod records;
mod report;
mod stats;

pub use bootstrap::{bootstrap_ci, bootstrap_means, BootstrapConfig};
pub use records::{read_jsonl, to_jsonl, write_jsonl, Dataset, PreferenceRecord, Source, Trial};
pub use report::{report, Counts, Report, ReportConfig};
pub use stats::{
    canonical_paths, cooperation_rate, filter_seed_trials, is_cooperative, layer_summary, path_gradient,
    path_gradient_partial, preference_proportion, step_estimate, CooperationMode, Estimate, GradientReport,
    LayerSummary, PathStep, StepFlag,
};

use crate::features::{ComparisonPair, FeatureVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("cannot bootstrap an empty sample")]
    EmptySample,
    #[error("invalid bootstrap settings: {resamples} resamples at alpha {alpha}")]
    InvalidBootstrap { resamples: usize, alpha: f64 },
    #[error("empty cell: {0}")]
    EmptyCell(String),
    #[error("no estimate for label {0}")]
    MissingLabel(FeatureVector),
    #[error("no estimate for pair {0}")]
    MissingPair(ComparisonPair),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("trial {trial_id}: {reason}")]
    InconsistentTrial { trial_id: String, reason: String },
    #[error("csv output failed: {0}")]
    Csv(String),
}

impl From<csv::Error> for AnalysisError {
    fn from(e: csv::Error) -> Self {
        AnalysisError::Csv(e.to_string())
    }
}
