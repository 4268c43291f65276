use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::intra::MatcherConfig;
use super::score::{match_prepared, PreparedTemplate};
use crate::error::{Error, Result};
use crate::minutiae::MinutiaeTemplate;

const MAGIC: &[u8; 4] = b"FPSC";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 13;
const RECORD_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairRecord {
    pub probe: u32,
    pub gallery: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairList {
    pub records: Vec<PairRecord>,
}

/// Read-only collection of prepared templates addressed by index.
#[derive(Debug, Clone)]
pub struct TemplateStore {
    ids: Vec<String>,
    prepared: Vec<PreparedTemplate>,
}

impl TemplateStore {
    pub fn new(templates: &[MinutiaeTemplate], cfg: &MatcherConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            ids: templates.iter().map(|t| t.source_id.clone()).collect(),
            prepared: templates.par_iter().map(|t| PreparedTemplate::new(t, cfg)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, idx: u32) -> Option<&PreparedTemplate> {
        self.prepared.get(idx as usize)
    }

    fn check(&self, pairs: &PairList) -> Result<()> {
        let n = self.len() as u64;
        match pairs.records.iter().position(|r| r.probe as u64 >= n || r.gallery as u64 >= n) {
            Some(index) => Err(Error::UnresolvedPair { index }),
            None => Ok(()),
        }
    }

    /// Scores in input order, computed on the current rayon pool.
    pub fn score_pairs(&self, pairs: &PairList) -> Result<Vec<u32>> {
        self.check(pairs)?;
        Ok(pairs
            .records
            .par_iter()
            .map(|r| match_prepared(&self.prepared[r.probe as usize], &self.prepared[r.gallery as usize]))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreRecord {
    pub probe: u32,
    pub gallery: u32,
    pub score: u32,
}

/// Scores plus the index-to-sourceId table stored beside them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreSet {
    pub ids: Vec<String>,
    pub records: Vec<ScoreRecord>,
}

pub fn ids_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

impl ScoreSet {
    pub fn scores(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.score).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * self.records.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        for r in &self.records {
            out.extend_from_slice(&r.probe.to_le_bytes());
            out.extend_from_slice(&r.gallery.to_le_bytes());
            out.extend_from_slice(&r.score.to_le_bytes());
        }
        out
    }

    pub fn records_from_bytes(bytes: &[u8]) -> Result<Vec<ScoreRecord>> {
        let bad = |m: String| Error::MalformedScoreSet(m);
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(bad("missing FPSC header".into()));
        }
        if bytes[4] != VERSION {
            return Err(bad(format!("unsupported version {}", bytes[4])));
        }
        let count = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let body = &bytes[HEADER_LEN..];
        if (body.len() as u64) != count.saturating_mul(RECORD_LEN as u64) {
            return Err(bad(format!("header declares {count} records, body holds {} bytes", body.len())));
        }
        let u32_at = |c: &[u8], o: usize| u32::from_le_bytes(c[o..o + 4].try_into().unwrap());
        Ok(body
            .chunks_exact(RECORD_LEN)
            .map(|c| ScoreRecord { probe: u32_at(c, 0), gallery: u32_at(c, 4), score: u32_at(c, 8) })
            .collect())
    }

    /// Writes `path` and the `<path>.ids` sidecar (one sourceId per line).
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = BufWriter::new(fs::File::create(path)?);
        f.write_all(&self.to_bytes())?;
        f.flush()?;
        let mut ids = String::new();
        for id in &self.ids {
            ids.push_str(id);
            ids.push('\n');
        }
        fs::write(ids_path(path), ids)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let records = Self::records_from_bytes(&fs::read(path)?)?;
        let ids: Vec<String> = fs::read_to_string(ids_path(path))?.lines().map(str::to_string).collect();
        let n = ids.len() as u64;
        if let Some(i) = records.iter().position(|r| r.probe as u64 >= n || r.gallery as u64 >= n) {
            return Err(Error::MalformedScoreSet(format!("record {i} refers past the {n} ids in the sidecar")));
        }
        Ok(Self { ids, records })
    }
}

/// Scores every pair on a dedicated pool of `threads` workers and writes the
/// score file. Output order and bytes do not depend on the thread count.
pub fn match_batch(store: &TemplateStore, pairs: &PairList, out: &Path, threads: usize) -> Result<ScoreSet> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let scores = pool.install(|| store.score_pairs(pairs))?;
    let set = ScoreSet {
        ids: store.ids.clone(),
        records: pairs
            .records
            .iter()
            .zip(scores)
            .map(|(r, score)| ScoreRecord { probe: r.probe, gallery: r.gallery, score })
            .collect(),
    };
    set.write(out)?;
    Ok(set)
}
