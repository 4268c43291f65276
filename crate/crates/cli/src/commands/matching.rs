use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fpsynth::biostats::{all_genuine_pairs, sample_imposter_pairs};
use fpsynth::matcher::{match_batch, PairList, PairRecord, ScoreSet, TemplateStore};
use fpsynth::minutiae::MinutiaeTemplate;

use crate::{Invalid, Manifest, RunConfig};

#[derive(Debug, Clone)]
pub enum PairSource {
    /// Every same-identity pair.
    Genuine,
    /// `eval.per_print` non-mated partners per print, drawn from the run seed.
    Imposter,
    /// Tab-separated `probe_print_id<TAB>gallery_print_id` lines.
    File(PathBuf),
}

/// Resolves a pair file against the manifest's print ids.
pub fn read_pairs(path: &Path, m: &Manifest) -> Result<PairList> {
    let text = fs::read_to_string(path).with_context(|| format!("reading pairs {}", path.display()))?;
    let index: HashMap<&str, u32> = m.entries.iter().enumerate().map(|(i, e)| (e.print_id.as_str(), i as u32)).collect();
    let mut records = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let k = records.len();
        let (p, g) = line
            .split_once('\t')
            .ok_or_else(|| Invalid(format!("pair record {k}: expected probe<TAB>gallery")))?;
        let look = |id: &str| index.get(id.trim()).copied().ok_or_else(|| Invalid(format!("pair record {k}: unknown print id {id:?}")));
        records.push(PairRecord { probe: look(p)?, gallery: look(g)? });
    }
    Ok(PairList { records })
}

pub fn pairs_for(cfg: &RunConfig, m: &Manifest, source: &PairSource) -> Result<PairList> {
    Ok(match source {
        PairSource::Genuine => all_genuine_pairs(&m.identities()),
        PairSource::Imposter => sample_imposter_pairs(&m.identities(), cfg.eval.per_print, cfg.seed)?,
        PairSource::File(p) => read_pairs(p, m)?,
    })
}

/// Scores the selected pairs of `templates` (manifest order) into `out`.
pub fn cmd_match(
    cfg: &RunConfig,
    m: &Manifest,
    templates: &[MinutiaeTemplate],
    source: &PairSource,
    out: &Path,
    threads: usize,
) -> Result<ScoreSet> {
    let pairs = pairs_for(cfg, m, source)?;
    let store = TemplateStore::new(templates, &cfg.matcher)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        super::ensure_dir(parent)?;
    }
    Ok(match_batch(&store, &pairs, out, threads)?)
}
