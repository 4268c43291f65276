use crate::error::{Error, Result};

/// Mean, sample standard deviation, skewness and excess kurtosis of one
/// metric over a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 divisor); 0 for a single value.
    pub std: f64,
    /// `g1 = m3 / m2^1.5` with biased central moments; absent when std is 0.
    pub skewness: Option<f64>,
    /// `g2 = m4 / m2^2 - 3`; absent when std is 0.
    pub excess_kurtosis: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Result<MetricSummary> {
    let n = values.len();
    if n == 0 {
        return Err(Error::TooFewSamples(0));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std = if n > 1 { (m2 / (nf - 1.0)).sqrt() } else { 0.0 };
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    // relative guard: a constant sample can leave rounding residue in m2
    let degenerate = n < 2 || m2 <= f64::EPSILON * mean.abs().max(1.0).powi(2) * 16.0;
    if degenerate {
        return Ok(MetricSummary { n, mean, std: if n > 1 { 0.0 } else { std }, skewness: None, excess_kurtosis: None });
    }
    Ok(MetricSummary {
        n,
        mean,
        std,
        skewness: Some(m3 / m2.powf(1.5)),
        excess_kurtosis: Some(m4 / (m2 * m2) - 3.0),
    })
}
