use rand::Rng;

use crate::error::{Error, Result};
use crate::imgcore::{convolve_space_variant, FrequencyMap, ForegroundMask, GaborKernel, GrayImage, OrientationField};

/// Growth schedule. Dense seeding and a short schedule keep the dislocations
/// (minutiae) that a long anneal from a few seeds would smooth away; the
/// white bias thins ridges so that ridge endings outnumber bifurcations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowConfig {
    /// Fraction of foreground pixels seeded dark.
    pub seed_density: f64,
    pub passes: usize,
    /// Mean absolute change, in gray levels, below which growth stops.
    pub tolerance: f64,
    /// Gaussian envelope width as a fraction of the local period.
    pub sigma_per_period: f64,
    pub gain: f32,
    pub white_bias: f32,
}

impl Default for GrowConfig {
    fn default() -> Self {
        Self { seed_density: 0.25, passes: 8, tolerance: 0.5, sigma_per_period: 0.35, gain: 2.5, white_bias: 0.3 }
    }
}

pub const GROW_KERNEL_SIZE: usize = 15;

/// Grows a ridge pattern from random dark seeds by repeated space-variant
/// Gabor filtering with a soft clip. Pixels where `inside` is false stay 255.
pub(crate) fn grow_in<R: Rng>(
    of: &OrientationField,
    fm: &FrequencyMap,
    width: usize,
    height: usize,
    inside: &[bool],
    cfg: &GrowConfig,
    rng: &mut R,
) -> GrayImage {
    let mut out = GrayImage::new(width, height, 255);
    let fg: Vec<usize> = (0..width * height).filter(|&i| inside[i]).collect();
    if fg.is_empty() {
        return out;
    }
    let freqs = fm.filled();
    let kernels: Vec<GaborKernel> = of
        .theta
        .iter()
        .zip(&freqs)
        .map(|(&t, &f)| GaborKernel::new(t, f, (cfg.sigma_per_period / f).clamp(1.5, 4.5), GROW_KERNEL_SIZE))
        .collect();
    let mut field = vec![0f32; width * height];
    let seeds = ((fg.len() as f64 * cfg.seed_density).round() as usize).max(1);
    for _ in 0..seeds {
        field[fg[rng.random_range(0..fg.len())]] = -1.0;
    }
    let bs = of.block_size;
    let cols = of.cols;
    for _ in 0..cfg.passes {
        let resp = convolve_space_variant(
            &field,
            width,
            height,
            &kernels,
            |x, y| inside[y * width + x].then_some((y / bs) * cols + x / bs),
            0.0,
        );
        let (mut change, mut level) = (0.0f64, 0.0f64);
        for &i in &fg {
            let v = (cfg.gain * resp[i] + cfg.white_bias).tanh();
            change += (v - field[i]).abs() as f64;
            level += v.abs() as f64;
            field[i] = v;
        }
        let n = fg.len() as f64;
        // sparse seeds barely move the mean, so only stop once the pattern
        // has filled the area
        if level / n > 0.5 && 127.5 * change / n < cfg.tolerance {
            break;
        }
    }
    for &i in &fg {
        out.pixels[i] = (127.5 + 127.5 * field[i] as f64).round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Block-mask form of the ridge growth; the mask must cover the same pixel
/// area as the fields.
pub fn grow_ridges<R: Rng>(
    of: &OrientationField,
    fm: &FrequencyMap,
    mask: &ForegroundMask,
    cfg: &GrowConfig,
    rng: &mut R,
) -> Result<GrayImage> {
    if fm.block_size != of.block_size || fm.cols != of.cols || fm.rows != of.rows {
        return Err(Error::InvalidParameter("frequency grid does not match orientation field".into()));
    }
    let (cols, rows) = OrientationField::grid_dims(mask.width, mask.height, of.block_size);
    if cols != of.cols || rows != of.rows {
        return Err(Error::InvalidParameter("mask size does not match orientation field".into()));
    }
    let inside = mask.to_pixels();
    Ok(grow_in(of, fm, mask.width, mask.height, &inside, cfg, rng))
}
