use std::f64::consts::PI;

use rayon::prelude::*;

use super::frequency::FrequencyMap;
use super::image::GrayImage;
use super::orientation::OrientationField;
use super::segment::ForegroundMask;
use crate::error::{Error, Result};

pub const ENHANCE_SIGMA: f64 = 4.0;
pub const ENHANCE_KERNEL_SIZE: usize = 11;

/// Even-symmetric Gabor kernel tuned to ridges at `theta` with frequency
/// `freq`. The kernel has zero mean and unit gain on a matched cosine, so a
/// full-swing grating in `[-1, 1]` filters back to roughly `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaborKernel {
    pub size: usize,
    pub weights: Vec<f32>,
}

impl GaborKernel {
    pub fn new(theta: f64, freq: f64, sigma: f64, size: usize) -> Self {
        let r = (size / 2) as f64;
        let (s, c) = theta.sin_cos();
        let mut w = Vec::with_capacity(size * size);
        let mut matched = Vec::with_capacity(size * size);
        for j in 0..size {
            for i in 0..size {
                let (dx, dy) = (i as f64 - r, j as f64 - r);
                let u = -dx * s + dy * c;
                let along = dx * c + dy * s;
                let env = (-(u * u + along * along) / (2.0 * sigma * sigma)).exp();
                let carrier = (2.0 * PI * freq * u).cos();
                w.push(env * carrier);
                matched.push(carrier);
            }
        }
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        w.iter_mut().for_each(|v| *v -= mean);
        let gain: f64 = w.iter().zip(&matched).map(|(a, b)| a * b).sum();
        let gain = if gain.abs() < 1e-12 { 1.0 } else { gain };
        Self { size, weights: w.iter().map(|v| (v / gain) as f32).collect() }
    }
}

/// Edge-clamped copy of `src` padded by `pad` on every side.
fn pad_clamped(src: &[f32], w: usize, h: usize, pad: usize) -> (Vec<f32>, usize) {
    let pw = w + 2 * pad;
    let ph = h + 2 * pad;
    let mut out = vec![0f32; pw * ph];
    for y in 0..ph {
        let sy = (y as isize - pad as isize).clamp(0, h as isize - 1) as usize;
        for x in 0..pw {
            let sx = (x as isize - pad as isize).clamp(0, w as isize - 1) as usize;
            out[y * pw + x] = src[sy * w + sx];
        }
    }
    (out, pw)
}

/// Convolves `src` with a per-block kernel bank. `kernel_of(x, y)` returns the
/// index of the kernel for the pixel, or `None` to leave `fill` there. All
/// kernels must share one size.
pub(crate) fn convolve_space_variant(
    src: &[f32],
    w: usize,
    h: usize,
    kernels: &[GaborKernel],
    kernel_of: impl Fn(usize, usize) -> Option<usize> + Sync,
    fill: f32,
) -> Vec<f32> {
    let size = kernels.first().map_or(1, |k| k.size);
    let pad = size / 2;
    let (padded, pw) = pad_clamped(src, w, h, pad);
    let mut out = vec![fill; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let Some(k) = kernel_of(x, y) else { continue };
            let kw = &kernels[k].weights;
            let mut acc = 0f32;
            for j in 0..size {
                let base = (y + j) * pw + x;
                let line = &padded[base..base + size];
                let kline = &kw[j * size..(j + 1) * size];
                acc += line.iter().zip(kline).map(|(a, b)| a * b).sum::<f32>();
            }
            *o = acc;
        }
    });
    out
}

fn check_grid(name: &str, bs: usize, cols: usize, rows: usize, of: &OrientationField) -> Result<()> {
    if bs != of.block_size || cols != of.cols || rows != of.rows {
        return Err(Error::InvalidParameter(format!("{name} grid does not match orientation field")));
    }
    Ok(())
}

/// Contextual filtering with even Gabor kernels tuned per block. Background
/// pixels become 255; absent frequencies fall back to the mean of present ones.
pub fn gabor_enhance(
    img: &GrayImage,
    of: &OrientationField,
    fm: &FrequencyMap,
    mask: &ForegroundMask,
) -> Result<GrayImage> {
    check_grid("frequency", fm.block_size, fm.cols, fm.rows, of)?;
    check_grid("mask", mask.block_size, mask.cols, mask.rows, of)?;
    let freqs = fm.filled();
    let kernels: Vec<GaborKernel> = of
        .theta
        .iter()
        .zip(&freqs)
        .map(|(&t, &f)| GaborKernel::new(t, f, ENHANCE_SIGMA, ENHANCE_KERNEL_SIZE))
        .collect();
    let src: Vec<f32> = img.pixels.iter().map(|&p| (p as f32 - 127.5) / 127.5).collect();
    let bs = of.block_size;
    let cols = of.cols;
    let resp = convolve_space_variant(
        &src,
        img.width,
        img.height,
        &kernels,
        |x, y| {
            let b = (y / bs) * cols + x / bs;
            mask.fg[b].then_some(b)
        },
        1.0,
    );
    let pixels = resp
        .iter()
        .map(|&r| (127.5 + 127.5 * r).round().clamp(0.0, 255.0) as u8)
        .collect();
    Ok(GrayImage { width: img.width, height: img.height, dpi: img.dpi, pixels })
}
