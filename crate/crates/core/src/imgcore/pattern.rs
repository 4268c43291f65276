//! Analytic test patterns: gratings whose orientation and period are known
//! exactly. Used for calibration and by the test suites.

use std::f64::consts::PI;

use super::image::GrayImage;

/// Signed distance of pixel centre `(x, y)` along the ridge normal of a
/// pattern whose ridges run at angle `theta`.
#[inline]
fn normal_coord(x: usize, y: usize, theta: f64) -> f64 {
    let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
    -px * theta.sin() + py * theta.cos()
}

/// Sinusoidal grating with ridges running at `theta` radians and the given
/// period in pixels. Phase 0 puts a dark ridge centre on the origin line.
pub fn sine_grating(width: usize, height: usize, theta: f64, period: f64, phase: f64) -> GrayImage {
    GrayImage::from_fn(width, height, |x, y| {
        let s = normal_coord(x, y, theta);
        let v = 127.5 - 127.5 * (2.0 * PI * s / period + phase).cos();
        v.round().clamp(0.0, 255.0) as u8
    })
}

/// Two-level grating: `dark` pixels of value 0 followed by `light` pixels of
/// value 255, repeating along the ridge normal.
pub fn square_grating(width: usize, height: usize, theta: f64, dark: f64, light: f64) -> GrayImage {
    let period = dark + light;
    GrayImage::from_fn(width, height, |x, y| {
        let s = normal_coord(x, y, theta).rem_euclid(period);
        if s < dark {
            0
        } else {
            255
        }
    })
}

/// Horizontal bands along y with integer widths; row-exact, no sampling.
pub fn horizontal_bands(width: usize, height: usize, dark: usize, light: usize) -> GrayImage {
    GrayImage::from_fn(width, height, |_, y| if y % (dark + light) < dark { 0 } else { 255 })
}
