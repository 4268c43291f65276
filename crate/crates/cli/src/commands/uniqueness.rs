use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use fpsynth::biostats::{
    cdf_points, histogram, ks_less, sample_imposter_pairs, select_threshold, EmpiricalDist, KsResult,
};
use fpsynth::matcher::{match_batch, PairList, PairRecord, ScoreSet, TemplateStore};
use fpsynth::minutiae::MinutiaeTemplate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ensure_dir;
use crate::{Manifest, RunConfig};

/// Stream id separating the cross-pair subsample from the imposter draws.
const CROSS_STREAM: u64 = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct DistSummary {
    pub n: usize,
    pub median: f64,
    pub mean: f64,
    pub max: u32,
    /// Comparisons scoring at or above the threshold.
    pub false_matches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub threshold: u64,
    pub achieved_far: f64,
    pub target_far: f64,
    /// (a) bonafide imposters, (b) synthetic vs bonafide, (c) synthetic imposters.
    pub bona: DistSummary,
    pub cross: DistSummary,
    pub syn: DistSummary,
    /// ks_less(cross, bona): is (b) stochastically smaller than (a)?
    pub ks: KsResult,
    pub warnings: Vec<String>,
}

fn summary(d: &EmpiricalDist, t: u64) -> DistSummary {
    DistSummary {
        n: d.len(),
        median: d.median().unwrap_or(0.0),
        mean: d.mean().unwrap_or(0.0),
        max: d.max().unwrap_or(0),
        false_matches: d.count_ge(t),
    }
}

/// Pairs of synthetic print `i` with bonafide print `j`, skipping pairs that
/// share an identity label. All of them, or a seeded uniform subsample of
/// the `ns * nb` grid when it exceeds the cap.
fn cross_pairs(cfg: &RunConfig, syn: &Manifest, bona: &Manifest) -> PairList {
    let (ns, nb) = (syn.len(), bona.len());
    let total = ns * nb;
    let cells: Vec<usize> = if cfg.eval.cross_full || total <= cfg.eval.cross_cap {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(CROSS_STREAM);
        let mut v = rand::seq::index::sample(&mut rng, total, cfg.eval.cross_cap).into_vec();
        v.sort_unstable();
        v
    };
    let records = cells
        .into_iter()
        .map(|c| (c / nb, c % nb))
        .filter(|&(i, j)| syn.entries[i].identity_id != bona.entries[j].identity_id)
        .map(|(i, j)| PairRecord { probe: i as u32, gallery: (ns + j) as u32 })
        .collect();
    PairList { records }
}

fn write_curves(dir: &Path, name: &str, d: &EmpiricalDist, bin_width: u32) -> Result<()> {
    let mut h = csv::Writer::from_path(dir.join(format!("{name}_hist.csv")))?;
    h.write_record(["bin_start", "count"])?;
    for b in histogram(d, bin_width)? {
        h.write_record([b.bin_start.to_string(), b.count.to_string()])?;
    }
    h.flush()?;
    let mut c = csv::Writer::from_path(dir.join(format!("{name}_cdf.csv")))?;
    c.write_record(["x", "F"])?;
    for (x, f) in cdf_points(d) {
        c.write_record([x.to_string(), f.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

fn markdown(r: &UniquenessReport) -> String {
    let mut s = String::from("# Uniqueness evaluation\n\n");
    let _ = writeln!(
        s,
        "Threshold {} selected on the bonafide imposter scores at target FAR {} (achieved {:.6}).\n",
        r.threshold, r.target_far, r.achieved_far
    );
    s.push_str("| Distribution | Comparisons | Median | Mean | Max | Scores >= threshold |\n|---|---|---|---|---|---|\n");
    for (name, d) in [
        ("(a) bonafide imposter", &r.bona),
        ("(b) synthetic vs bonafide", &r.cross),
        ("(c) synthetic imposter", &r.syn),
    ] {
        let _ = writeln!(s, "| {name} | {} | {} | {:.3} | {} | {} |", d.n, d.median, d.mean, d.max, d.false_matches);
    }
    let _ = writeln!(
        s,
        "\nOne-sided KS test, H1 \"(b) is stochastically smaller than (a)\": D = {:.6}, p = {:.6e} (n = {}, m = {}).",
        r.ks.d, r.ks.p, r.ks.n, r.ks.m
    );
    if !r.warnings.is_empty() {
        s.push_str("\n## Warnings\n\n");
        for w in &r.warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s
}

fn summary_csv(path: &Path, r: &UniquenessReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["key", "value"])?;
    let mut put = |k: &str, v: String| w.write_record([k, &v]);
    put("threshold", r.threshold.to_string())?;
    put("target_far", r.target_far.to_string())?;
    put("achieved_far", r.achieved_far.to_string())?;
    for (p, d) in [("bona", &r.bona), ("cross", &r.cross), ("syn", &r.syn)] {
        put(&format!("{p}_n"), d.n.to_string())?;
        put(&format!("{p}_median"), d.median.to_string())?;
        put(&format!("{p}_false_matches"), d.false_matches.to_string())?;
    }
    put("ks_d", r.ks.d.to_string())?;
    put("ks_p", r.ks.p.to_string())?;
    w.flush()?;
    Ok(())
}

/// Imposter distributions of both datasets and their cross distribution,
/// the threshold at the target FAR, false-match counts and the KS test.
/// Scores are persisted as `a_bona.fpsc`, `b_cross.fpsc` and `c_syn.fpsc`.
pub fn cmd_eval_uniqueness(
    cfg: &RunConfig,
    bona: &Manifest,
    bona_templates: &[MinutiaeTemplate],
    syn: &Manifest,
    syn_templates: &[MinutiaeTemplate],
    out: &Path,
    threads: usize,
) -> Result<UniquenessReport> {
    ensure_dir(out)?;
    let bona_store = TemplateStore::new(bona_templates, &cfg.matcher)?;
    let syn_store = TemplateStore::new(syn_templates, &cfg.matcher)?;
    let mut both = syn_templates.to_vec();
    both.extend_from_slice(bona_templates);
    let cross_store = TemplateStore::new(&both, &cfg.matcher)?;

    let a_pairs = sample_imposter_pairs(&bona.identities(), cfg.eval.per_print, cfg.seed).context("bonafide imposters")?;
    let c_pairs = sample_imposter_pairs(&syn.identities(), cfg.eval.per_print, cfg.seed).context("synthetic imposters")?;
    let b_pairs = cross_pairs(cfg, syn, bona);

    let a = match_batch(&bona_store, &a_pairs, &out.join("a_bona.fpsc"), threads)?;
    let b = match_batch(&cross_store, &b_pairs, &out.join("b_cross.fpsc"), threads)?;
    let c = match_batch(&syn_store, &c_pairs, &out.join("c_syn.fpsc"), threads)?;
    let report = evaluate(cfg, &a, &b, &c)?;

    let (da, db, dc) = (EmpiricalDist::new(a.scores()), EmpiricalDist::new(b.scores()), EmpiricalDist::new(c.scores()));
    for (name, d) in [("a_bona", &da), ("b_cross", &db), ("c_syn", &dc)] {
        write_curves(out, name, d, cfg.eval.hist_bin_width).with_context(|| format!("writing {name} curves"))?;
    }
    fs::write(out.join("summary.md"), markdown(&report))?;
    summary_csv(&out.join("summary.csv"), &report)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report)
}

/// The report as a pure function of the three score sets.
pub fn evaluate(cfg: &RunConfig, a: &ScoreSet, b: &ScoreSet, c: &ScoreSet) -> Result<UniquenessReport> {
    let (da, db, dc) = (EmpiricalDist::new(a.scores()), EmpiricalDist::new(b.scores()), EmpiricalDist::new(c.scores()));
    let choice = select_threshold(&da, cfg.eval.target_far).context("bonafide imposter scores")?;
    let mut warnings = Vec::new();
    if cfg.eval.target_far * (da.len() as f64) < 1.0 {
        warnings.push(format!(
            "FAR below resolution: target {} needs at least {} imposter scores, have {}",
            cfg.eval.target_far,
            (1.0 / cfg.eval.target_far).ceil(),
            da.len()
        ));
    }
    if db.is_empty() {
        warnings.push("no synthetic-vs-bonafide pairs (every pair shares an identity label)".into());
    }
    let t = choice.threshold;
    Ok(UniquenessReport {
        threshold: t,
        achieved_far: choice.achieved_far,
        target_far: cfg.eval.target_far,
        bona: summary(&da, t),
        cross: summary(&db, t),
        syn: summary(&dc, t),
        ks: ks_less(&db, &da),
        warnings,
    })
}
