//! The isotropy score: how uniformly a point cloud spreads its variance
//! across the ambient dimensions.
//!
//! The score is 1 for a perfectly isotropic cloud (identity covariance up to
//! scale), 0 for a cloud whose variance lives in a single direction, and
//! interpolates linearly in the fraction of dimensions the cloud actually
//! uses. The pipeline: rotate onto principal axes, take the per-axis
//! variances, compare their normalized profile against the flat profile, and
//! map the resulting defect through the dimension-counting identities.

use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg;

/// Everything computed on the way to the score, kept for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct IsotropyResult {
    /// Per-axis variances after PCA reorientation, descending.
    pub variance_vector: Vec<f64>,
    /// The variance vector rescaled to Euclidean norm `sqrt(n)`.
    pub normalized_variance_vector: Vec<f64>,
    /// Distance from the flat profile, normalized to `[0, 1]`.
    pub defect: f64,
    /// Estimated number of dimensions the cloud uses, in `[1, n]`.
    pub dims_utilized: f64,
    /// `dims_utilized / n`.
    pub fraction_utilized: f64,
    /// The isotropy score in `[0, 1]`.
    pub score: f64,
}

/// Per-axis variances of an already PCA-reoriented cloud: the diagonal of
/// its covariance, descending because reorientation orders the axes.
///
/// Callers are responsible for reorienting first; debug builds check that
/// the off-diagonal covariance is negligible.
pub fn variance_vector(reoriented: &PointCloud) -> Result<Vec<f64>> {
    let cov = linalg::covariance(reoriented)?;
    let diag: Vec<f64> = (0..reoriented.dim()).map(|i| cov[(i, i)]).collect();
    debug_assert!(
        {
            let max_diag = diag.iter().fold(0.0f64, |m, &v| m.max(v));
            cov.indexed_iter()
                .filter(|((i, j), _)| i != j)
                .all(|(_, &v)| v.abs() <= 1e-8 * max_diag)
        },
        "variance_vector expects a PCA-reoriented cloud"
    );
    Ok(diag)
}

/// Rescales a variance vector so its Euclidean norm is `sqrt(n)`, the norm
/// of the all-ones vector it is compared against.
pub fn normalize_variance_vector(variances: &[f64]) -> Result<Vec<f64>> {
    let n = variances.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    for (index, &value) in variances.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeVariance { index, value });
        }
    }
    let norm = variances.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::DegenerateCovariance);
    }
    let scale = (n as f64).sqrt() / norm;
    Ok(variances.iter().map(|v| v * scale).collect())
}

/// Distance between the normalized variance vector and the all-ones vector,
/// divided by the largest distance any normalized vector can attain, giving
/// a defect in `[0, 1]`.
pub fn isotropy_defect(normalized: &[f64]) -> Result<f64> {
    let n = normalized.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    debug_assert!(
        {
            let norm = normalized.iter().map(|v| v * v).sum::<f64>().sqrt();
            (norm - nf.sqrt()).abs() <= 1e-9 * nf.sqrt()
        },
        "isotropy_defect expects a vector of norm sqrt(n)"
    );
    let dist = normalized
        .iter()
        .map(|v| (v - 1.0).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((dist / (2.0 * (nf - nf.sqrt())).sqrt()).clamp(0.0, 1.0))
}

/// Number of dimensions a cloud with the given defect uses, in `[1, n]`.
///
/// Zero defect gives `n`; the maximal defect gives 1 (all variance on one
/// axis).
pub fn dims_utilized(defect: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    let k = (nf - defect * defect * (nf - nf.sqrt())).powi(2) / nf;
    Ok(k.clamp(1.0, nf))
}

/// Inverts the score back to a dimension count: a score of `s` in ambient
/// dimension `n` corresponds to `s * n + (1 - s)` utilized dimensions.
pub fn dims_from_score(score: f64, n: usize) -> f64 {
    let nf = n as f64;
    score * nf + 1.0 - score
}

/// Computes the isotropy score of a cloud: reorient onto principal axes,
/// read off the variance profile, and score it.
pub fn isoscore(cloud: &PointCloud) -> Result<IsotropyResult> {
    let reoriented = linalg::pca_reorient(cloud)?;
    let variances = variance_vector(&reoriented)?;
    isoscore_from_covariance(&variances)
}

/// Scores a variance spectrum directly, skipping the data pass.
///
/// This is the exact evaluation path: feeding the diagonal of a population
/// covariance gives the population score with no sampling noise.
pub fn isoscore_from_covariance(variances: &[f64]) -> Result<IsotropyResult> {
    let n = variances.len();
    let normalized = normalize_variance_vector(variances)?;
    let defect = isotropy_defect(&normalized)?;
    let k = dims_utilized(defect, n)?;
    let nf = n as f64;
    let fraction = k / nf;
    // The affine map sends fraction 1/n (one live axis) to 0 and fraction 1
    // to 1; the clamp on dims_utilized already confines it to [0, 1].
    let score = (nf * fraction - 1.0) / (nf - 1.0);
    Ok(IsotropyResult {
        variance_vector: variances.to_vec(),
        normalized_variance_vector: normalized,
        defect,
        dims_utilized: k,
        fraction_utilized: fraction,
        score,
    })
}
