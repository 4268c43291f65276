mod extract;
mod fid;
mod ingest;
mod matching;
mod metrics;
mod synth;
mod uniqueness;

pub use extract::{cmd_extract, extract_all, load_templates, template_path};
pub use fid::{cmd_fid, read_features};
pub use ingest::{cmd_ingest, IdentityRule};
pub use matching::{cmd_match, read_pairs, PairSource};
pub use metrics::{cmd_metrics, read_nfiq2, Dataset, MetricsOutput};
pub use synth::{cmd_synth, SynthArgs};
pub use uniqueness::{cmd_eval_uniqueness, evaluate, DistSummary, UniquenessReport};

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
