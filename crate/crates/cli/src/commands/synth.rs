use std::path::PathBuf;

use anyhow::{Context, Result};
use fpsynth::imgcore::save_image;
use fpsynth::synthgen::{generate_master, impression_seed, render_baseline, render_mate, FingerClass, SynthParams};
use rayon::prelude::*;

use super::ensure_dir;
use crate::{Invalid, Manifest, RunConfig};

#[derive(Debug, Clone)]
pub struct SynthArgs {
    pub count: usize,
    /// Impressions per master; impression 0 is the baseline rendering.
    pub impressions: usize,
    /// Seed of the first master; master `k` uses `first_seed + k`.
    pub first_seed: u64,
    pub class: Option<FingerClass>,
    pub out: PathBuf,
}

pub fn file_name(seed: u64, impression: usize) -> String {
    format!("s{seed}_i{impression}.png")
}

/// Generates `count` masters with `impressions` prints each and writes
/// `manifest.tsv` into the output directory. Identity = master seed.
pub fn cmd_synth(cfg: &RunConfig, a: &SynthArgs) -> Result<Manifest> {
    if a.count == 0 || a.impressions == 0 {
        return Err(Invalid("synth needs a positive count and at least one impression per master".into()).into());
    }
    let last = a.first_seed.checked_add(a.count as u64 - 1);
    if last.is_none() {
        return Err(Invalid("seed range overflows u64".into()).into());
    }
    ensure_dir(&a.out)?;
    let files: Vec<Vec<String>> = (0..a.count as u64)
        .into_par_iter()
        .map(|k| {
            let seed = a.first_seed + k;
            let params = SynthParams { seed, class: a.class, ..cfg.synth.clone() };
            let master = generate_master(&params).with_context(|| format!("master {seed}"))?;
            let mut names = Vec::with_capacity(a.impressions);
            for i in 0..a.impressions {
                let img = if i == 0 {
                    render_baseline(&master, &params).image
                } else {
                    render_mate(&master, &params, impression_seed(seed, i as u64)).image
                };
                let name = file_name(seed, i);
                save_image(&img, &a.out.join(&name)).with_context(|| format!("writing {name}"))?;
                names.push(name);
            }
            Ok(names)
        })
        .collect::<Result<_>>()?;
    let mut m = Manifest::new(&a.out);
    for (k, names) in files.iter().enumerate() {
        let seed = (a.first_seed + k as u64).to_string();
        for name in names {
            m.push(name.trim_end_matches(".png"), &seed, name)?;
        }
    }
    m.write(&a.out.join("manifest.tsv"))?;
    Ok(m)
}
