//! Ridge-valley signature metrics and the per-print quality rows of a
//! dataset report: ridge and white-line counts, ridge-to-valley thickness
//! ratio, fingerprint area, externally computed NFIQ2 scores and the
//! minutiae statistics.

mod patches;
mod report;
mod signature;

pub use patches::{score_patches, select_patches, PatchScore, DEFAULT_PATCH_COUNT, PATCH_STRIDE};
pub use report::{dataset_report, full_report, DatasetReport, Measure, ReportRow};
pub use signature::{
    block_signature, interior_dark_width_std, signature_features, signature_runs, BlockSignature, Run,
    SignatureFeatures, MIN_PATCH_COHERENCE, MIN_SIGNATURE_RANGE, PATCH_SIZE,
};

use crate::error::{Error, Result};
use crate::imgcore::{estimate_orientation, segment, GrayImage, DEFAULT_BLOCK_SIZE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintMetrics {
    pub ridge_count: f64,
    pub white_line_count: f64,
    /// Mean over patches of dark width / light width.
    pub rtvtr: f64,
    /// Mean over patches of `min(r, 1/r)`.
    pub rtvtr_folded: f64,
    /// Foreground area in thousands of square pixels.
    pub area_kpx2: f64,
    pub nfiq2: Option<u8>,
    pub patches: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsConfig {
    pub block_size: usize,
    pub patch_count: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { block_size: DEFAULT_BLOCK_SIZE, patch_count: DEFAULT_PATCH_COUNT }
    }
}

pub fn check_nfiq2(score: i64) -> Result<u8> {
    u8::try_from(score).ok().filter(|&s| s <= 100).ok_or(Error::Nfiq2OutOfRange(score))
}

pub fn print_metrics(img: &GrayImage, nfiq2: Option<i64>) -> Result<PrintMetrics> {
    print_metrics_with(img, nfiq2, &MetricsConfig::default())
}

pub fn print_metrics_with(img: &GrayImage, nfiq2: Option<i64>, cfg: &MetricsConfig) -> Result<PrintMetrics> {
    let nfiq2 = nfiq2.map(check_nfiq2).transpose()?;
    if cfg.patch_count == 0 {
        return Err(Error::InvalidParameter("patch count must be positive".into()));
    }
    let of = estimate_orientation(img, cfg.block_size)?;
    let mask = segment(img, cfg.block_size);
    let origins = select_patches(img, &of, &mask, cfg.patch_count)?;
    let (mut r, mut w, mut t, mut tf) = (0.0, 0.0, 0.0, 0.0);
    for &o in &origins {
        let f = signature_features(&block_signature(img, &of, o)?)?;
        r += f.ridges as f64;
        w += f.white_lines as f64;
        t += f.rtvtr;
        tf += f.rtvtr_folded();
    }
    let n = origins.len() as f64;
    Ok(PrintMetrics {
        ridge_count: r / n,
        white_line_count: w / n,
        rtvtr: t / n,
        rtvtr_folded: tf / n,
        area_kpx2: mask.pixel_count() as f64 / 1000.0,
        nfiq2,
        patches: origins.len(),
    })
}
