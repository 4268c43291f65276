use super::PrintMetrics;
use crate::biostats::{summarize, MetricSummary};
use crate::error::{Error, Result};
use crate::minutiae::MinutiaeTemplate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    EndingCount,
    BifurcationCount,
    EndingReliability,
    BifurcationReliability,
    BifurcationFraction,
    RidgeCount,
    WhiteLineCount,
    Rtvtr,
    Area,
    Nfiq2,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::EndingCount,
        Measure::BifurcationCount,
        Measure::EndingReliability,
        Measure::BifurcationReliability,
        Measure::BifurcationFraction,
        Measure::RidgeCount,
        Measure::WhiteLineCount,
        Measure::Rtvtr,
        Measure::Area,
        Measure::Nfiq2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Measure::EndingCount => "Ridge Ending Minutiae Count",
            Measure::BifurcationCount => "Bifurcation Minutiae Count",
            Measure::EndingReliability => "Reliability of Ridge Minutiae",
            Measure::BifurcationReliability => "Reliability of Bifurcation Minutiae",
            Measure::BifurcationFraction => "Percentage of Bifurcation Minutiae",
            Measure::RidgeCount => "Ridge Count",
            Measure::WhiteLineCount => "White Lines Count",
            Measure::Rtvtr => "RTVTR",
            Measure::Area => "Area of the Fingerprint",
            Measure::Nfiq2 => "NFIQ2 Score",
        }
    }

    /// Snake-case key used in CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Measure::EndingCount => "ending_count",
            Measure::BifurcationCount => "bifurcation_count",
            Measure::EndingReliability => "ending_reliability",
            Measure::BifurcationReliability => "bifurcation_reliability",
            Measure::BifurcationFraction => "bifurcation_fraction",
            Measure::RidgeCount => "ridge_count",
            Measure::WhiteLineCount => "white_line_count",
            Measure::Rtvtr => "rtvtr",
            Measure::Area => "area_kpx2",
            Measure::Nfiq2 => "nfiq2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub measure: Measure,
    /// Absent when no print has a value.
    pub summary: Option<MetricSummary>,
    /// Prints contributing a value.
    pub present: usize,
    pub total: usize,
}

impl ReportRow {
    pub fn coverage(&self) -> f64 {
        self.present as f64 / self.total as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReport {
    pub prints: usize,
    pub rows: Vec<ReportRow>,
}

impl DatasetReport {
    pub fn row(&self, m: Measure) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.measure == m)
    }
}

fn row(measure: Measure, values: impl Iterator<Item = Option<f64>>) -> Result<ReportRow> {
    let mut total = 0;
    let mut present = Vec::new();
    for v in values {
        total += 1;
        present.extend(v);
    }
    let summary = if present.is_empty() { None } else { Some(summarize(&present)?) };
    Ok(ReportRow { measure, summary, present: present.len(), total })
}

/// Signature, area and NFIQ2 rows. Prints without an NFIQ2 score are left
/// out of that row and show up in its coverage.
pub fn dataset_report(metrics: &[PrintMetrics]) -> Result<DatasetReport> {
    if metrics.is_empty() {
        return Err(Error::TooFewSamples(0));
    }
    let rows = vec![
        row(Measure::RidgeCount, metrics.iter().map(|m| Some(m.ridge_count)))?,
        row(Measure::WhiteLineCount, metrics.iter().map(|m| Some(m.white_line_count)))?,
        row(Measure::Rtvtr, metrics.iter().map(|m| Some(m.rtvtr)))?,
        row(Measure::Area, metrics.iter().map(|m| Some(m.area_kpx2)))?,
        row(Measure::Nfiq2, metrics.iter().map(|m| m.nfiq2.map(f64::from)))?,
    ];
    Ok(DatasetReport { prints: metrics.len(), rows })
}

/// All rows, with minutiae statistics from `templates[i]` of print `i`.
/// Reliability rows average the per-print means of prints that have
/// minutiae of that kind.
pub fn full_report(metrics: &[PrintMetrics], templates: &[MinutiaeTemplate]) -> Result<DatasetReport> {
    if metrics.len() != templates.len() {
        return Err(Error::DimensionMismatch(format!("{} metric rows, {} templates", metrics.len(), templates.len())));
    }
    let base = dataset_report(metrics)?;
    let counts: Vec<_> = templates.iter().map(|t| t.counts()).collect();
    let rel: Vec<_> = templates.iter().map(|t| t.reliability_stats()).collect();
    let mut rows = vec![
        row(Measure::EndingCount, counts.iter().map(|c| Some(c.endings as f64)))?,
        row(Measure::BifurcationCount, counts.iter().map(|c| Some(c.bifurcations as f64)))?,
        row(Measure::EndingReliability, rel.iter().map(|r| r.mean_ending))?,
        row(Measure::BifurcationReliability, rel.iter().map(|r| r.mean_bifurcation))?,
        row(Measure::BifurcationFraction, counts.iter().map(|c| Some(c.pct_bifurcation)))?,
    ];
    rows.extend(base.rows);
    Ok(DatasetReport { prints: base.prints, rows })
}
