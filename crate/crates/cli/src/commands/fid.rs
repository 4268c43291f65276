use std::path::Path;

use anyhow::{Context, Result};
use fpsynth::biostats::{feature_stats, frechet_distance, FrechetResult};

use crate::Invalid;

/// Numeric feature rows of a CSV file; a non-numeric first row is a header.
pub fn read_features(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{} line {}", path.display(), n + 1))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.iter().all(|x| x.is_finite()) => rows.push(v),
            _ if n == 0 => continue,
            _ => return Err(Invalid(format!("{} line {}: non-numeric feature", path.display(), n + 1)).into()),
        }
    }
    Ok(rows)
}

pub fn cmd_fid(a: &Path, b: &Path) -> Result<FrechetResult> {
    let (ma, ca) = feature_stats(&read_features(a)?).with_context(|| format!("features of {}", a.display()))?;
    let (mb, cb) = feature_stats(&read_features(b)?).with_context(|| format!("features of {}", b.display()))?;
    Ok(frechet_distance(&ma, &ca, &mb, &cb)?)
}
