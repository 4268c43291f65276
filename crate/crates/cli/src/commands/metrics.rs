use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use fpsynth::biostats::{histogram, EmpiricalDist};
use fpsynth::fpmetrics::{full_report, print_metrics_with, DatasetReport, Measure, PrintMetrics};
use fpsynth::imgcore::load_image;
use fpsynth::minutiae::{extract_with, MinutiaeTemplate};
use rayon::prelude::*;

use super::ensure_dir;
use crate::{Invalid, Manifest, RunConfig};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub label: String,
    pub manifest: Manifest,
}

#[derive(Debug, Clone)]
pub struct MetricsOutput {
    pub label: String,
    pub prints: Vec<PrintMetrics>,
    pub templates: Vec<MinutiaeTemplate>,
    pub report: DatasetReport,
}

/// `print_id,nfiq2` rows; a first row whose score is not an integer is a header.
pub fn read_nfiq2(path: &Path) -> Result<HashMap<String, i64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = HashMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{} line {}", path.display(), n + 1))?;
        if rec.len() != 2 {
            return Err(Invalid(format!("{} line {}: expected print_id,nfiq2", path.display(), n + 1)).into());
        }
        match rec[1].parse::<i64>() {
            Ok(v) => {
                out.insert(rec[0].to_string(), v);
            }
            Err(_) if n == 0 => continue,
            Err(_) => return Err(Invalid(format!("{} line {}: bad score {:?}", path.display(), n + 1, &rec[1])).into()),
        }
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_prints(path: &Path, d: &Dataset, o: &MetricsOutput) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record([
        "print_id",
        "identity_id",
        "ending_count",
        "bifurcation_count",
        "ending_reliability",
        "bifurcation_reliability",
        "bifurcation_fraction",
        "ridge_count",
        "white_line_count",
        "rtvtr",
        "rtvtr_folded",
        "area_kpx2",
        "nfiq2",
        "patches",
    ])?;
    for ((e, m), t) in d.manifest.entries.iter().zip(&o.prints).zip(&o.templates) {
        let c = t.counts();
        let r = t.reliability_stats();
        w.write_record([
            e.print_id.clone(),
            e.identity_id.clone(),
            c.endings.to_string(),
            c.bifurcations.to_string(),
            opt(r.mean_ending),
            opt(r.mean_bifurcation),
            c.pct_bifurcation.to_string(),
            m.ridge_count.to_string(),
            m.white_line_count.to_string(),
            m.rtvtr.to_string(),
            m.rtvtr_folded.to_string(),
            m.area_kpx2.to_string(),
            m.nfiq2.map(|v| v.to_string()).unwrap_or_default(),
            m.patches.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into())
}

fn table_markdown(outputs: &[MetricsOutput], measures: &[Measure], nfiq2_given: bool) -> String {
    let mut s = String::from("# Fingerprint metrics\n\n| Metric |");
    for o in outputs {
        let _ = write!(s, " {0} mean | {0} std | {0} skewness | {0} excess kurtosis |", o.label);
    }
    s.push_str("\n|---|");
    s.push_str(&"---|---|---|---|".repeat(outputs.len()));
    s.push('\n');
    for &m in measures {
        let _ = write!(s, "| {} |", m.label());
        for o in outputs {
            let sm = o.report.row(m).and_then(|r| r.summary);
            let _ = write!(
                s,
                " {} | {} | {} | {} |",
                cell(sm.map(|x| x.mean)),
                cell(sm.map(|x| x.std)),
                cell(sm.and_then(|x| x.skewness)),
                cell(sm.and_then(|x| x.excess_kurtosis))
            );
        }
        s.push('\n');
    }
    s.push_str("\nMinutiae counts are taken after spurious-minutiae filtering. Kurtosis is excess kurtosis (normal = 0).\n");
    s.push_str("RTVTR is the mean per-patch dark/light width ratio; the per-print CSV also holds its folded form min(r, 1/r).\n");
    if !nfiq2_given {
        s.push_str("\nNFIQ2 row omitted: no NFIQ2 scores were supplied.\n");
    }
    s
}

fn write_table_csv(path: &Path, outputs: &[MetricsOutput], measures: &[Measure]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["dataset", "measure", "present", "total", "mean", "std", "skewness", "excess_kurtosis"])?;
    for o in outputs {
        for &m in measures {
            let Some(r) = o.report.row(m) else { continue };
            let sm = r.summary;
            w.write_record([
                o.label.clone(),
                m.key().to_string(),
                r.present.to_string(),
                r.total.to_string(),
                opt(sm.map(|x| x.mean)),
                opt(sm.map(|x| x.std)),
                opt(sm.and_then(|x| x.skewness)),
                opt(sm.and_then(|x| x.excess_kurtosis)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn measure_dataset(cfg: &RunConfig, d: &Dataset, nfiq2: Option<&HashMap<String, i64>>) -> Result<MetricsOutput> {
    let per_print: Vec<(PrintMetrics, MinutiaeTemplate)> = d
        .manifest
        .entries
        .par_iter()
        .map(|e| {
            let path = d.manifest.image_path(e);
            let img = load_image(&path).with_context(|| format!("loading {}", path.display()))?;
            let score = nfiq2.and_then(|m| m.get(&e.print_id).copied());
            let pm = print_metrics_with(&img, score, &cfg.metrics).with_context(|| format!("metrics of {}", e.print_id))?;
            let t = extract_with(&img, &e.print_id, &cfg.extract).with_context(|| format!("extracting {}", e.print_id))?;
            Ok((pm, t))
        })
        .collect::<Result<_>>()?;
    let (prints, templates): (Vec<_>, Vec<_>) = per_print.into_iter().unzip();
    let report = full_report(&prints, &templates)?;
    Ok(MetricsOutput { label: d.label.clone(), prints, templates, report })
}

/// Per-print CSVs, a side-by-side summary table (markdown and CSV) and,
/// when scores are supplied, an NFIQ2 histogram per dataset.
pub fn cmd_metrics(cfg: &RunConfig, datasets: &[Dataset], nfiq2_csv: Option<&Path>, out: &Path) -> Result<Vec<MetricsOutput>> {
    if datasets.is_empty() {
        return Err(Invalid("metrics needs at least one manifest".into()).into());
    }
    let mut seen = HashSet::new();
    if let Some(d) = datasets.iter().find(|d| !seen.insert(d.label.as_str())) {
        return Err(Invalid(format!("duplicate dataset label {:?}", d.label)).into());
    }
    ensure_dir(out)?;
    let nfiq2 = nfiq2_csv.map(read_nfiq2).transpose()?;
    let mut outputs = Vec::new();
    for d in datasets {
        let o = measure_dataset(cfg, d, nfiq2.as_ref())?;
        write_prints(&out.join(format!("{}_prints.csv", d.label)), d, &o)?;
        let scores: Vec<u32> = o.prints.iter().filter_map(|p| p.nfiq2.map(u32::from)).collect();
        if nfiq2.is_some() {
            let mut w = csv::Writer::from_path(out.join(format!("{}_nfiq2_hist.csv", d.label)))?;
            w.write_record(["bin_start", "count"])?;
            for b in histogram(&EmpiricalDist::new(scores), 1)? {
                w.write_record([b.bin_start.to_string(), b.count.to_string()])?;
            }
            w.flush()?;
        }
        outputs.push(o);
    }
    let measures: Vec<Measure> = Measure::ALL.into_iter().filter(|&m| m != Measure::Nfiq2 || nfiq2.is_some()).collect();
    fs::write(out.join("table1.md"), table_markdown(&outputs, &measures, nfiq2.is_some()))?;
    write_table_csv(&out.join("table1.csv"), &outputs, &measures)?;
    if nfiq2.is_none() {
        eprintln!("note: NFIQ2 row omitted, no NFIQ2 scores supplied");
    }
    Ok(outputs)
}
