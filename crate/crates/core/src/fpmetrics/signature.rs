use crate::error::{Error, Result};
use crate::imgcore::{ridge_signature, GrayImage, OrientationField};

pub const PATCH_SIZE: usize = 32;
/// Blocks at or below this orientation coherence have no usable ridge axis.
pub const MIN_PATCH_COHERENCE: f64 = 0.3;
/// Profiles spanning fewer gray levels than this carry no ridge structure.
pub const MIN_SIGNATURE_RANGE: f64 = 8.0;

/// Gray profile across the ridges of one 32x32 block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSignature {
    /// Top-left pixel of the block.
    pub origin: (usize, usize),
    /// Ridge angle used for the rotated sampling grid, radians.
    pub theta: f64,
    pub profile: Vec<f64>,
}

/// Averages the block along its ridge direction, giving one value per pixel
/// step along the ridge normal. The block angle is the coherence-weighted
/// mean of the field blocks it overlaps.
pub fn block_signature(img: &GrayImage, of: &OrientationField, origin: (usize, usize)) -> Result<BlockSignature> {
    let (x0, y0) = origin;
    if x0 + PATCH_SIZE > img.width || y0 + PATCH_SIZE > img.height {
        return Err(Error::InvalidParameter(format!("block at ({x0}, {y0}) leaves the image")));
    }
    let (theta, coherence) = of.region_average(x0, y0, PATCH_SIZE, PATCH_SIZE);
    if coherence <= MIN_PATCH_COHERENCE {
        return Err(Error::UnorientedBlock { x: x0, y: y0 });
    }
    let c = PATCH_SIZE as f64 / 2.0;
    let profile = ridge_signature(img, x0 as f64 + c, y0 as f64 + c, theta, PATCH_SIZE, PATCH_SIZE);
    Ok(BlockSignature { origin, theta, profile })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub dark: bool,
    pub start: usize,
    pub len: usize,
}

/// Maximal dark and light runs of a profile split at its midrange. Samples
/// exactly on the threshold count as light.
pub fn signature_runs(profile: &[f64]) -> Result<Vec<Run>> {
    let (lo, hi) = profile.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if profile.is_empty() || hi - lo < MIN_SIGNATURE_RANGE {
        return Err(Error::FlatSignature);
    }
    let mid = (lo + hi) / 2.0;
    let mut runs: Vec<Run> = Vec::new();
    for (i, &v) in profile.iter().enumerate() {
        let dark = v < mid;
        match runs.last_mut() {
            Some(r) if r.dark == dark => r.len += 1,
            _ => runs.push(Run { dark, start: i, len: 1 }),
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureFeatures {
    pub ridges: usize,
    pub white_lines: usize,
    /// Mean dark-run width over mean light-run width.
    pub rtvtr: f64,
}

impl SignatureFeatures {
    /// `min(r, 1/r)`, the ratio folded into `(0, 1]`.
    pub fn rtvtr_folded(&self) -> f64 {
        self.rtvtr.min(1.0 / self.rtvtr)
    }
}

pub fn signature_features(s: &BlockSignature) -> Result<SignatureFeatures> {
    features_of(&signature_runs(&s.profile)?)
}

fn features_of(runs: &[Run]) -> Result<SignatureFeatures> {
    let (mut dn, mut dw, mut ln, mut lw) = (0usize, 0usize, 0usize, 0usize);
    for r in runs {
        if r.dark {
            dn += 1;
            dw += r.len;
        } else {
            ln += 1;
            lw += r.len;
        }
    }
    // a profile with range >= 8 always has both a dark and a light sample
    if dn == 0 || ln == 0 {
        return Err(Error::FlatSignature);
    }
    let rtvtr = (dw as f64 / dn as f64) / (lw as f64 / ln as f64);
    Ok(SignatureFeatures { ridges: dn, white_lines: ln, rtvtr })
}

/// Population standard deviation of the widths of dark runs that do not
/// touch either end of the profile; `None` with fewer than two such runs.
pub fn interior_dark_width_std(runs: &[Run], len: usize) -> Option<f64> {
    let w: Vec<f64> =
        runs.iter().filter(|r| r.dark && r.start > 0 && r.start + r.len < len).map(|r| r.len as f64).collect();
    if w.len() < 2 {
        return None;
    }
    let m = w.iter().sum::<f64>() / w.len() as f64;
    Some((w.iter().map(|v| (v - m).powi(2)).sum::<f64>() / w.len() as f64).sqrt())
}
