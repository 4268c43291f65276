use std::f64::consts::PI;

use rand::Rng;

use super::layout::{FingerClass, SingularityLayout};
use crate::imgcore::{wrap_pi, FrequencyMap, OrientationField};

/// Ridge angle at a continuous point.
///
/// Loops and whorls use the zero-pole model: half the summed arguments
/// towards the cores minus those towards the deltas, plus `theta0`. Arches
/// have no singular points; their ridges follow `y = -A cos(pi (x - cx) / W)`
/// under a vertical envelope, so the slope is a scaled horizontal sinusoid.
pub fn orientation_at(layout: &SingularityLayout, x: f64, y: f64) -> f64 {
    if layout.class == FingerClass::Arch {
        let s = &layout.silhouette;
        let w = s.a_left + s.a_right;
        let top = s.cy - s.c - 0.3 * s.b_top;
        let env = (-((y - top) / (0.9 * (s.c + s.b_bottom))).powi(2)).exp();
        let slope = 1.1 * (PI * (x - s.cx) / w).sin() * env;
        return wrap_pi(layout.theta0 + slope.atan());
    }
    let mut a = 0.0;
    for &(cx, cy) in &layout.cores {
        a += (y - cy).atan2(x - cx);
    }
    for &(dx, dy) in &layout.deltas {
        a -= (y - dy).atan2(x - dx);
    }
    wrap_pi(layout.theta0 + 0.5 * a)
}

/// Block-sampled orientation field; coherence 1 inside the outline, 0 outside.
pub fn build_orientation(layout: &SingularityLayout, width: usize, height: usize, block_size: usize) -> OrientationField {
    let mut of = OrientationField::from_fn(width, height, block_size, |_, _| (0.0, 0.0));
    for by in 0..of.rows {
        for bx in 0..of.cols {
            let (x, y) = of.block_center(bx, by, width, height);
            let i = by * of.cols + bx;
            of.theta[i] = orientation_at(layout, x, y);
            of.coherence[i] = if layout.silhouette.contains_point(x, y) { 1.0 } else { 0.0 };
        }
    }
    of
}

/// A base period drawn from `period_range` with a smooth ±5 % block jitter.
pub fn jittered_frequency<R: Rng>(
    cols: usize,
    rows: usize,
    block_size: usize,
    period_range: (f64, f64),
    rng: &mut R,
) -> FrequencyMap {
    let base = if period_range.1 > period_range.0 {
        rng.random_range(period_range.0..=period_range.1)
    } else {
        period_range.0
    };
    let raw: Vec<f64> = (0..cols * rows).map(|_| rng.random_range(-0.05..=0.05)).collect();
    let mut freq = Vec::with_capacity(cols * rows);
    for by in 0..rows {
        for bx in 0..cols {
            let (mut s, mut n) = (0.0, 0.0);
            for j in by.saturating_sub(2)..(by + 3).min(rows) {
                for i in bx.saturating_sub(2)..(bx + 3).min(cols) {
                    s += raw[j * cols + i];
                    n += 1.0;
                }
            }
            freq.push(Some(1.0 / (base * (1.0 + s / n))));
        }
    }
    FrequencyMap { block_size, cols, rows, freq }
}
