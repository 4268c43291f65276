use super::image::GrayImage;
use super::orientation::OrientationField;

pub const MIN_PERIOD: f64 = 3.0;
pub const MAX_PERIOD: f64 = 25.0;
/// Ridge frequency used where nothing could be measured (9 px period).
pub const FALLBACK_FREQ: f64 = 1.0 / 9.0;

/// Block-wise ridge frequency in cycles per pixel; `None` where unreliable.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMap {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
    pub freq: Vec<Option<f64>>,
}

impl FrequencyMap {
    pub fn uniform(cols: usize, rows: usize, block_size: usize, freq: f64) -> Self {
        Self { block_size, cols, rows, freq: vec![Some(freq); cols * rows] }
    }

    /// Mean of the present values, or the fallback when none are present.
    pub fn mean_present(&self) -> f64 {
        let (sum, n) = self
            .freq
            .iter()
            .flatten()
            .fold((0.0, 0usize), |(s, n), &f| (s + f, n + 1));
        if n == 0 {
            FALLBACK_FREQ
        } else {
            sum / n as f64
        }
    }

    /// Frequencies with gaps filled by the mean of present values.
    pub fn filled(&self) -> Vec<f64> {
        let fill = self.mean_present();
        self.freq.iter().map(|f| f.unwrap_or(fill)).collect()
    }
}

/// Oriented gray-level profile ("x-signature") across the ridges of a window
/// centred at `(cx, cy)`: `len` samples along the ridge normal, each the mean
/// of `across` samples along the ridge direction.
pub fn ridge_signature(
    img: &GrayImage,
    cx: f64,
    cy: f64,
    theta: f64,
    len: usize,
    across: usize,
) -> Vec<f64> {
    let (tx, ty) = (theta.cos(), theta.sin());
    let (nx, ny) = (-ty, tx);
    let half_len = (len as f64 - 1.0) / 2.0;
    let half_across = (across as f64 - 1.0) / 2.0;
    (0..len)
        .map(|k| {
            let u = k as f64 - half_len;
            let mut acc = 0.0;
            for l in 0..across {
                let v = l as f64 - half_across;
                acc += img.sample(cx + u * nx + v * tx, cy + u * ny + v * ty);
            }
            acc / across as f64
        })
        .collect()
}

/// Mean peak-to-peak spacing of a signature. Peaks are the centroids of the
/// runs above the signature mean that do not touch either end.
pub fn mean_peak_spacing(signature: &[f64]) -> Option<f64> {
    if signature.len() < 3 {
        return None;
    }
    let n = signature.len();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let a = signature[i.saturating_sub(1)];
            let c = signature[(i + 1).min(n - 1)];
            (a + 2.0 * signature[i] + c) / 4.0
        })
        .collect();
    let mean = smooth.iter().sum::<f64>() / n as f64;
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        if smooth[i] > mean {
            let start = i;
            let (mut wsum, mut msum) = (0.0, 0.0);
            while i < n && smooth[i] > mean {
                let excess = smooth[i] - mean;
                wsum += excess * i as f64;
                msum += excess;
                i += 1;
            }
            if start > 0 && i < n {
                peaks.push(wsum / msum);
            }
        } else {
            i += 1;
        }
    }
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

pub fn estimate_frequency(img: &GrayImage, of: &OrientationField) -> FrequencyMap {
    let bs = of.block_size;
    let mut freq = Vec::with_capacity(of.cols * of.rows);
    for by in 0..of.rows {
        for bx in 0..of.cols {
            let (cx, cy) = of.block_center(bx, by, img.width, img.height);
            let sig = ridge_signature(img, cx, cy, of.theta_at(bx, by), 2 * bs, bs);
            let f = mean_peak_spacing(&sig)
                .filter(|p| (MIN_PERIOD..=MAX_PERIOD).contains(p))
                .map(|p| 1.0 / p);
            freq.push(f);
        }
    }
    FrequencyMap { block_size: bs, cols: of.cols, rows: of.rows, freq }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::orientation::estimate_orientation;
    use crate::imgcore::pattern::{sine_grating, square_grating};

    fn interior(fm: &FrequencyMap) -> impl Iterator<Item = Option<f64>> + '_ {
        (1..fm.rows - 1).flat_map(move |by| (1..fm.cols - 1).map(move |bx| fm.freq[by * fm.cols + bx]))
    }

    #[test]
    fn period_nine_grating() {
        let img = sine_grating(128, 128, 0.4, 9.0, 0.3);
        let of = estimate_orientation(&img, 16).unwrap();
        let fm = estimate_frequency(&img, &of);
        for f in interior(&fm) {
            let f = f.expect("present");
            assert!((f - 1.0 / 9.0).abs() / (1.0 / 9.0) < 0.1, "freq {f}");
        }
    }

    #[test]
    fn uniform_image_all_absent() {
        let img = GrayImage::new(64, 64, 200);
        let of = estimate_orientation(&img, 16).unwrap();
        assert!(estimate_frequency(&img, &of).freq.iter().all(Option::is_none));
    }

    #[test]
    fn period_two_is_out_of_range() {
        let img = square_grating(96, 96, 0.0, 1.0, 1.0);
        let of = estimate_orientation(&img, 16).unwrap();
        let fm = estimate_frequency(&img, &of);
        assert!(interior(&fm).all(|f| f.is_none()));
    }

    #[test]
    fn spacing_of_square_wave_profile() {
        let sig: Vec<f64> = (0..32).map(|i| if (i / 4) % 2 == 0 { 0.0 } else { 255.0 }).collect();
        assert!((mean_peak_spacing(&sig).unwrap() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn fallback_when_nothing_present() {
        let fm = FrequencyMap { block_size: 16, cols: 2, rows: 1, freq: vec![None, None] };
        assert_eq!(fm.filled(), vec![FALLBACK_FREQ; 2]);
        let fm = FrequencyMap { block_size: 16, cols: 2, rows: 1, freq: vec![Some(0.1), None] };
        assert_eq!(fm.filled(), vec![0.1, 0.1]);
    }
}
