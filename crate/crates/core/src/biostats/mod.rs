//! Score distributions, pair sampling, threshold selection, the one-sided
//! two-sample KS test, moment summaries and the Fréchet distance.

mod dist;
mod frechet;
mod ks;
mod moments;
mod pairs;

pub use dist::{
    cdf_points, far_at_threshold, histogram, select_threshold, subsample_scores, tpr_at_threshold, EmpiricalDist,
    HistogramBin, ThresholdChoice,
};
pub use frechet::{feature_stats, frechet_distance, FrechetResult, PSD_TOLERANCE};
pub use ks::{ks_less, KsResult};
pub use moments::{summarize, MetricSummary};
pub use pairs::{all_genuine_pairs, sample_imposter_pairs};
