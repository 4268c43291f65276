//! Pair-table minutiae matcher and the deterministic batch engine.
//!
//! Each template is reduced to a table of minutia pairs described by their
//! distance and the two minutia directions relative to the joining segment,
//! all invariant to rotation and translation. Matching pairs compatible
//! entries across two tables and scores the largest rotation-consistent
//! cluster of them.

mod batch;
mod intra;
mod score;

pub use batch::{ids_path, match_batch, PairList, PairRecord, ScoreRecord, ScoreSet, TemplateStore};
pub use intra::{build_intra, wrap_deg, IntraEntry, IntraTable, MatcherConfig};
pub use score::{match_prepared, match_templates, PreparedTemplate};
