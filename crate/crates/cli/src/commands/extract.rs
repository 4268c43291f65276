use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fpsynth::imgcore::load_image;
use fpsynth::minutiae::{extract_with, MinutiaeTemplate};
use rayon::prelude::*;

use super::ensure_dir;
use crate::{Manifest, RunConfig};

pub fn template_path(dir: &Path, print_id: &str) -> PathBuf {
    dir.join(format!("{print_id}.fpt"))
}

/// Templates of every manifest print, in manifest order.
pub fn extract_all(cfg: &RunConfig, m: &Manifest) -> Result<Vec<MinutiaeTemplate>> {
    m.entries
        .par_iter()
        .map(|e| {
            let path = m.image_path(e);
            let img = load_image(&path).with_context(|| format!("loading {}", path.display()))?;
            extract_with(&img, &e.print_id, &cfg.extract).with_context(|| format!("extracting {}", e.print_id))
        })
        .collect()
}

/// Writes one `<print_id>.fpt` template per print.
pub fn cmd_extract(cfg: &RunConfig, m: &Manifest, out: &Path) -> Result<Vec<MinutiaeTemplate>> {
    ensure_dir(out)?;
    let templates = extract_all(cfg, m)?;
    for t in &templates {
        let p = template_path(out, &t.source_id);
        fs::write(&p, t.to_text()?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(templates)
}

pub fn load_templates(m: &Manifest, dir: &Path) -> Result<Vec<MinutiaeTemplate>> {
    m.entries
        .iter()
        .map(|e| {
            let p = template_path(dir, &e.print_id);
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            MinutiaeTemplate::from_text(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}
