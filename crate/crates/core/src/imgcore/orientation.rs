use std::f64::consts::PI;

use super::image::GrayImage;
use crate::error::{Error, Result};

/// Block-wise ridge orientation. `theta` is the ridge direction in image
/// coordinates (x right, y down), wrapped to `[0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
    pub theta: Vec<f64>,
    pub coherence: Vec<f64>,
}

#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    // rem_euclid can round up to exactly PI for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two undirected angles, in `[0, pi/2]`.
#[inline]
pub fn undirected_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

impl OrientationField {
    pub fn grid_dims(width: usize, height: usize, block_size: usize) -> (usize, usize) {
        (width.div_ceil(block_size), height.div_ceil(block_size))
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        block_size: usize,
        mut f: impl FnMut(usize, usize) -> (f64, f64),
    ) -> Self {
        let (cols, rows) = Self::grid_dims(width, height, block_size);
        let mut theta = Vec::with_capacity(cols * rows);
        let mut coherence = Vec::with_capacity(cols * rows);
        for by in 0..rows {
            for bx in 0..cols {
                let (t, c) = f(bx, by);
                theta.push(wrap_pi(t));
                coherence.push(c);
            }
        }
        Self { block_size, cols, rows, theta, coherence }
    }

    #[inline]
    pub fn index_of_pixel(&self, x: usize, y: usize) -> usize {
        let bx = (x / self.block_size).min(self.cols - 1);
        let by = (y / self.block_size).min(self.rows - 1);
        by * self.cols + bx
    }

    pub fn theta_at(&self, bx: usize, by: usize) -> f64 {
        self.theta[by * self.cols + bx]
    }

    pub fn coherence_at(&self, bx: usize, by: usize) -> f64 {
        self.coherence[by * self.cols + bx]
    }

    /// Pixel centre of block `(bx, by)` clipped to the image area.
    pub fn block_center(&self, bx: usize, by: usize, width: usize, height: usize) -> (f64, f64) {
        let x0 = bx * self.block_size;
        let y0 = by * self.block_size;
        let x1 = (x0 + self.block_size).min(width);
        let y1 = (y0 + self.block_size).min(height);
        ((x0 + x1) as f64 / 2.0, (y0 + y1) as f64 / 2.0)
    }

    /// Coherence-weighted doubled-angle average over the blocks overlapped by
    /// the pixel rectangle `[x0, x0+w) x [y0, y0+h)`. Returns `(theta, coherence)`.
    pub fn region_average(&self, x0: usize, y0: usize, w: usize, h: usize) -> (f64, f64) {
        let bx0 = x0 / self.block_size;
        let by0 = y0 / self.block_size;
        let bx1 = ((x0 + w).saturating_sub(1) / self.block_size).min(self.cols - 1);
        let by1 = ((y0 + h).saturating_sub(1) / self.block_size).min(self.rows - 1);
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
        for by in by0..=by1 {
            for bx in bx0..=bx1 {
                let i = by * self.cols + bx;
                let c = self.coherence[i];
                sx += c * (2.0 * self.theta[i]).cos();
                sy += c * (2.0 * self.theta[i]).sin();
                n += 1.0;
            }
        }
        if n == 0.0 {
            return (0.0, 0.0);
        }
        let mag = (sx * sx + sy * sy).sqrt() / n;
        if mag == 0.0 {
            return (0.0, 0.0);
        }
        (wrap_pi(0.5 * sy.atan2(sx)), mag)
    }
}

/// 3x3 Sobel gradients with edge clamping.
pub(crate) fn sobel(img: &GrayImage) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (img.width, img.height);
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let p = |x: isize, y: isize| -> f64 {
        let xc = x.clamp(0, w as isize - 1) as usize;
        let yc = y.clamp(0, h as isize - 1) as usize;
        img.pixels[yc * w + xc] as f64
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let a = p(x - 1, y - 1);
            let b = p(x, y - 1);
            let c = p(x + 1, y - 1);
            let d = p(x - 1, y);
            let f = p(x + 1, y);
            let g = p(x - 1, y + 1);
            let hh = p(x, y + 1);
            let i = p(x + 1, y + 1);
            let idx = y as usize * w + x as usize;
            gx[idx] = (c + 2.0 * f + i) - (a + 2.0 * d + g);
            gy[idx] = (g + 2.0 * hh + i) - (a + 2.0 * b + c);
        }
    }
    (gx, gy)
}

/// Squared-gradient orientation estimate with 3x3 block smoothing of the
/// doubled-angle vectors.
pub fn estimate_orientation(img: &GrayImage, block_size: usize) -> Result<OrientationField> {
    if !(8..=32).contains(&block_size) {
        return Err(Error::InvalidParameter(format!("block size {block_size} outside [8, 32]")));
    }
    let (w, h) = (img.width, img.height);
    let (cols, rows) = OrientationField::grid_dims(w, h, block_size);
    let (gx, gy) = sobel(img);

    let mut vx = vec![0.0; cols * rows];
    let mut vy = vec![0.0; cols * rows];
    let mut mag = vec![0.0; cols * rows];
    for y in 0..h {
        let by = y / block_size;
        for x in 0..w {
            let b = by * cols + x / block_size;
            let (a, c) = (gx[y * w + x], gy[y * w + x]);
            vx[b] += a * a - c * c;
            vy[b] += 2.0 * a * c;
            mag[b] += a * a + c * c;
        }
    }

    let mut theta = vec![0.0; cols * rows];
    let mut coherence = vec![0.0; cols * rows];
    for by in 0..rows {
        for bx in 0..cols {
            let (mut sx, mut sy, mut sm) = (0.0, 0.0, 0.0);
            for ny in by.saturating_sub(1)..=(by + 1).min(rows - 1) {
                for nx in bx.saturating_sub(1)..=(bx + 1).min(cols - 1) {
                    let n = ny * cols + nx;
                    sx += vx[n];
                    sy += vy[n];
                    sm += mag[n];
                }
            }
            let i = by * cols + bx;
            // Sobel on 8-bit data: any real edge contributes far more than this.
            if sm > 1e-6 {
                theta[i] = wrap_pi(0.5 * sy.atan2(sx) + PI / 2.0);
                coherence[i] = ((sx * sx + sy * sy).sqrt() / sm).clamp(0.0, 1.0);
            }
        }
    }
    Ok(OrientationField { block_size, cols, rows, theta, coherence })
}
