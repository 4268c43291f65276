use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sorted integer score sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDist {
    scores: Vec<u32>,
}

impl EmpiricalDist {
    pub fn new(mut scores: Vec<u32>) -> Self {
        scores.sort_unstable();
        Self { scores }
    }

    pub fn scores(&self) -> &[u32] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn min(&self) -> Option<u32> {
        self.scores.first().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.scores.last().copied()
    }

    /// Number of scores `<= x`.
    pub fn count_le(&self, x: u64) -> usize {
        self.scores.partition_point(|&s| (s as u64) <= x)
    }

    /// Number of scores `>= t`.
    pub fn count_ge(&self, t: u64) -> usize {
        self.scores.len() - self.scores.partition_point(|&s| (s as u64) < t)
    }

    /// Right-continuous empirical CDF.
    pub fn cdf(&self, x: u64) -> f64 {
        self.count_le(x) as f64 / self.scores.len() as f64
    }

    pub fn median(&self) -> Option<f64> {
        let n = self.scores.len();
        if n == 0 {
            return None;
        }
        Some(if n % 2 == 1 {
            self.scores[n / 2] as f64
        } else {
            (self.scores[n / 2 - 1] as f64 + self.scores[n / 2] as f64) / 2.0
        })
    }

    pub fn mean(&self) -> Option<f64> {
        if self.scores.is_empty() {
            return None;
        }
        Some(self.scores.iter().map(|&s| s as f64).sum::<f64>() / self.scores.len() as f64)
    }
}

/// Fraction of imposter scores at or above `t`.
pub fn far_at_threshold(d: &EmpiricalDist, t: u64) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(d.count_ge(t) as f64 / d.len() as f64)
}

/// Fraction of genuine scores at or above `t`.
pub fn tpr_at_threshold(genuine: &EmpiricalDist, t: u64) -> Result<f64> {
    far_at_threshold(genuine, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub threshold: u64,
    pub achieved_far: f64,
}

/// Smallest integer threshold (not below the minimum score) whose FAR does
/// not exceed `target_far`.
pub fn select_threshold(imposter: &EmpiricalDist, target_far: f64) -> Result<ThresholdChoice> {
    let (Some(min), Some(max)) = (imposter.min(), imposter.max()) else {
        return Err(Error::EmptyDistribution);
    };
    let n = imposter.len() as f64;
    if target_far >= 1.0 {
        return Ok(ThresholdChoice { threshold: min as u64, achieved_far: 1.0 });
    }
    if target_far > 0.0 {
        // walk distinct values upward: the FAR of v+1 is the mass strictly above v
        let s = imposter.scores();
        let mut i = 0;
        while i < s.len() {
            let v = s[i];
            let mut j = i;
            while j < s.len() && s[j] == v {
                j += 1;
            }
            let far = (s.len() - j) as f64 / n;
            if far <= target_far {
                return Ok(ThresholdChoice { threshold: v as u64 + 1, achieved_far: far });
            }
            i = j;
        }
    }
    Ok(ThresholdChoice { threshold: max as u64 + 1, achieved_far: 0.0 })
}

/// Uniform subsample without replacement; `k >= n` keeps everything.
pub fn subsample_scores(scores: &[u32], k: usize, seed: u64) -> EmpiricalDist {
    if k >= scores.len() {
        return EmpiricalDist::new(scores.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, scores.len(), k);
    EmpiricalDist::new(picked.iter().map(|i| scores[i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramBin {
    pub bin_start: u64,
    pub count: usize,
}

/// Fixed-width histogram starting at the bin containing the minimum score.
/// Empty bins between occupied ones are emitted with count 0.
pub fn histogram(d: &EmpiricalDist, bin_width: u32) -> Result<Vec<HistogramBin>> {
    if bin_width == 0 {
        return Err(Error::InvalidParameter("histogram bin width must be positive".into()));
    }
    let (Some(min), Some(max)) = (d.min(), d.max()) else {
        return Ok(Vec::new());
    };
    let w = bin_width as u64;
    let first = (min as u64 / w) * w;
    let nbins = ((max as u64 - first) / w + 1) as usize;
    let mut counts = vec![0usize; nbins];
    for &s in d.scores() {
        counts[((s as u64 - first) / w) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin { bin_start: first + i as u64 * w, count })
        .collect())
}

/// Step points of the right-continuous CDF, one per distinct score.
pub fn cdf_points(d: &EmpiricalDist) -> Vec<(u32, f64)> {
    let s = d.scores();
    let n = s.len() as f64;
    let mut out = Vec::new();
    for (i, &v) in s.iter().enumerate() {
        if i + 1 == s.len() || s[i + 1] != v {
            out.push((v, (i + 1) as f64 / n));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_threshold(scores: &[u32], target: f64) -> u64 {
        let d = EmpiricalDist::new(scores.to_vec());
        let (min, max) = (d.min().unwrap() as u64, d.max().unwrap() as u64);
        (min..=max + 1).find(|&t| far_at_threshold(&d, t).unwrap() <= target).unwrap_or(max + 1)
    }

    #[test]
    fn far_counts_at_or_above() {
        let d = EmpiricalDist::new((1..=100).collect());
        assert!((far_at_threshold(&d, 41).unwrap() - 0.60).abs() < 1e-12);
        assert_eq!(far_at_threshold(&d, 101).unwrap(), 0.0);
        assert_eq!(far_at_threshold(&d, 1).unwrap(), 1.0);
        assert_eq!(far_at_threshold(&d, 0).unwrap(), 1.0);
        assert!(far_at_threshold(&EmpiricalDist::new(vec![]), 3).is_err());
    }

    #[test]
    fn tpr_mirrors_far() {
        let d = EmpiricalDist::new(vec![10, 20, 30, 40]);
        assert_eq!(tpr_at_threshold(&d, 25).unwrap(), 0.5);
        assert_eq!(tpr_at_threshold(&d, 41).unwrap(), 0.0);
        assert_eq!(tpr_at_threshold(&d, 10).unwrap(), 1.0);
    }

    #[test]
    fn threshold_examples() {
        let mut s = vec![1u32; 10];
        s.push(50);
        let d = EmpiricalDist::new(s.clone());
        let c = select_threshold(&d, 0.1).unwrap();
        assert_eq!(c.threshold, 2);
        assert!((c.achieved_far - 1.0 / 11.0).abs() < 1e-12);
        assert_eq!(c.threshold, brute_threshold(&s, 0.1));

        assert_eq!(select_threshold(&d, 1.0).unwrap().threshold, 1);

        let flat = EmpiricalDist::new(vec![7; 20]);
        assert_eq!(select_threshold(&flat, 0.5).unwrap(), ThresholdChoice { threshold: 8, achieved_far: 0.0 });
        assert_eq!(select_threshold(&flat, 0.0).unwrap(), ThresholdChoice { threshold: 8, achieved_far: 0.0 });
        assert_eq!(select_threshold(&flat, -1.0).unwrap().threshold, 8);
    }

    #[test]
    fn subsample_is_seeded() {
        let s: Vec<u32> = (0..1000).collect();
        assert_eq!(subsample_scores(&s, 100, 5), subsample_scores(&s, 100, 5));
        assert_ne!(subsample_scores(&s, 100, 5), subsample_scores(&s, 100, 6));
        assert_eq!(subsample_scores(&s, 1000, 5).scores(), &s[..]);
        assert_eq!(subsample_scores(&s, 5000, 5).len(), 1000);
        let sub = subsample_scores(&s, 300, 1);
        let mut v = sub.scores().to_vec();
        v.dedup();
        assert_eq!(v.len(), 300);
    }

    #[test]
    fn histogram_and_cdf() {
        let one = EmpiricalDist::new(vec![17]);
        assert_eq!(histogram(&one, 5).unwrap(), vec![HistogramBin { bin_start: 15, count: 1 }]);
        let d = EmpiricalDist::new(vec![0, 1, 1, 4, 9, 9, 9]);
        let h = histogram(&d, 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 7);
        assert_eq!(h[0], HistogramBin { bin_start: 0, count: 3 });
        assert_eq!(h.len(), 5);
        let c = cdf_points(&d);
        assert_eq!(c.last().unwrap().1, 1.0);
        assert_eq!(c[1], (1, 3.0 / 7.0));
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn median_of_even_sample() {
        assert_eq!(EmpiricalDist::new(vec![4, 1, 3, 2]).median(), Some(2.5));
        assert_eq!(EmpiricalDist::new(vec![]).median(), None);
    }
}
