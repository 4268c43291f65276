use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as numerical noise and clamped to 0.
pub const PSD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetResult {
    pub distance: f64,
    pub distance_squared: f64,
}

fn clamped_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    // symmetrize first; inputs built from floating sums drift slightly
    let sym = (m + m.transpose()) * 0.5;
    let mut eig = SymmetricEigen::new(sym);
    for v in eig.eigenvalues.iter_mut() {
        if *v < -PSD_TOLERANCE {
            return Err(Error::NotPsd(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(eig)
}

fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = clamped_eigen(m)?;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Fréchet (2-Wasserstein) distance between N(mu_a, cov_a) and N(mu_b, cov_b).
/// `tr((A B)^1/2)` is taken as the sum of square roots of the eigenvalues of
/// the symmetric matrix `S B S` with `S = A^1/2`.
pub fn frechet_distance(
    mu_a: &DVector<f64>,
    cov_a: &DMatrix<f64>,
    mu_b: &DVector<f64>,
    cov_b: &DMatrix<f64>,
) -> Result<FrechetResult> {
    let k = mu_a.len();
    if mu_b.len() != k || cov_a.shape() != (k, k) || cov_b.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "mu {} vs {}, cov {:?} vs {:?}",
            mu_a.len(),
            mu_b.len(),
            cov_a.shape(),
            cov_b.shape()
        )));
    }
    let s = psd_sqrt(cov_a)?;
    clamped_eigen(cov_b)?;
    let inner = &s * cov_b * &s;
    let cross: f64 = clamped_eigen(&inner)?.eigenvalues.iter().map(|v| v.sqrt()).sum();
    let diff = mu_a - mu_b;
    let d2 = (diff.dot(&diff) + cov_a.trace() + cov_b.trace() - 2.0 * cross).max(0.0);
    Ok(FrechetResult { distance: d2.sqrt(), distance_squared: d2 })
}

/// Sample mean and covariance (n - 1 divisor) of row-major feature vectors.
pub fn feature_stats(rows: &[Vec<f64>]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let k = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != k) {
        return Err(Error::DimensionMismatch(format!("row {bad} has {} columns, expected {k}", rows[bad].len())));
    }
    let mut mu = DVector::zeros(k);
    for r in rows {
        for (m, v) in mu.iter_mut().zip(r) {
            *m += v;
        }
    }
    mu /= n as f64;
    let mut cov = DMatrix::zeros(k, k);
    for r in rows {
        let d = DVector::from_iterator(k, r.iter().zip(mu.iter()).map(|(v, m)| v - m));
        cov += &d * d.transpose();
    }
    cov /= (n - 1) as f64;
    Ok((mu, cov))
}
