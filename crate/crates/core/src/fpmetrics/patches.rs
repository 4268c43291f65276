use super::signature::{block_signature, interior_dark_width_std, signature_runs, PATCH_SIZE};
use crate::error::{Error, Result};
use crate::imgcore::{ForegroundMask, GrayImage, OrientationField};

pub const PATCH_STRIDE: usize = 16;
pub const DEFAULT_PATCH_COUNT: usize = 15;

/// A measurable candidate block and its ridge-width spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchScore {
    pub origin: (usize, usize),
    pub width_std: f64,
}

fn fully_foreground(mask: &ForegroundMask, x0: usize, y0: usize) -> bool {
    (y0..y0 + PATCH_SIZE).all(|y| (x0..x0 + PATCH_SIZE).all(|x| mask.contains(x, y)))
}

/// Every measurable 32x32 block on the 16-px lattice, in (y, x) order.
pub fn score_patches(img: &GrayImage, of: &OrientationField, mask: &ForegroundMask) -> Vec<PatchScore> {
    let mut out = Vec::new();
    if img.width < PATCH_SIZE || img.height < PATCH_SIZE {
        return out;
    }
    for y0 in (0..=img.height - PATCH_SIZE).step_by(PATCH_STRIDE) {
        for x0 in (0..=img.width - PATCH_SIZE).step_by(PATCH_STRIDE) {
            if !fully_foreground(mask, x0, y0) {
                continue;
            }
            let Ok(sig) = block_signature(img, of, (x0, y0)) else { continue };
            let Ok(runs) = signature_runs(&sig.profile) else { continue };
            if let Some(width_std) = interior_dark_width_std(&runs, sig.profile.len()) {
                out.push(PatchScore { origin: (x0, y0), width_std });
            }
        }
    }
    out
}

/// The `k` foreground blocks with the most uniform ridge widths; ties go to
/// the block first in (y, x) order.
pub fn select_patches(
    img: &GrayImage,
    of: &OrientationField,
    mask: &ForegroundMask,
    k: usize,
) -> Result<Vec<(usize, usize)>> {
    let mut scored = score_patches(img, of, mask);
    if scored.is_empty() {
        return Err(Error::NoMeasurablePatches);
    }
    // stable sort keeps the (y, x) scan order among equal spreads
    scored.sort_by(|a, b| a.width_std.total_cmp(&b.width_std));
    Ok(scored.into_iter().take(k).map(|p| p.origin).collect())
}
