//! Rival isotropy estimators the harness pits against the isotropy score:
//! average cosine similarity, the partition ratio, a nearest-neighbor
//! intrinsic-dimension score, and the variance-explained ratio.
//!
//! Each estimator maps a cloud to a single number where larger is supposed
//! to mean "more isotropic". They are implemented exactly as commonly used,
//! including their known failure modes; the harness exists to exhibit those.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::Stream;

/// Sampled pair count used by default for average cosine similarity.
pub const DEFAULT_COSINE_PAIRS: usize = 100_000;
/// Default neighbor range for the intrinsic-dimension estimator.
pub const DEFAULT_ID_K_MIN: usize = 5;
pub const DEFAULT_ID_K_MAX: usize = 20;
/// Intrinsic-dimension runs subsample clouds larger than this.
pub const DEFAULT_ID_SUBSAMPLE: usize = 5_000;

// ------------------------------------------------------------------------
// Average cosine similarity
// ------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CosSimConfig {
    /// Number of point pairs to sample.
    pub pairs: usize,
    pub seed: u64,
}

impl CosSimConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            pairs: DEFAULT_COSINE_PAIRS,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CosSimResult {
    /// `1 - |mean cosine|`, so 1 reads as isotropic.
    pub score: f64,
    pub mean_cosine: f64,
}

/// Average cosine similarity over sampled pairs of distinct points.
///
/// Pairs with a zero-norm endpoint are redrawn. If the sampler cannot find
/// enough usable pairs within a hundred attempts per requested pair, the
/// cloud is effectively all zeros and an error is returned.
pub fn avg_cos_sim(cloud: &PointCloud, config: &CosSimConfig) -> Result<CosSimResult> {
    if config.pairs == 0 {
        return Err(Error::InvalidConfig("pair count must be positive".into()));
    }
    let count = cloud.count();
    let dim = cloud.dim();
    let flat = cloud.flat();
    let norms: Vec<f64> = (0..count)
        .map(|i| {
            flat[i * dim..(i + 1) * dim]
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
        })
        .collect();

    let mut stream = Stream::new(config.seed);
    let budget = config.pairs.saturating_mul(100);
    let mut attempts = 0usize;
    let mut sum = 0.0f64;
    for _ in 0..config.pairs {
        loop {
            attempts += 1;
            if attempts > budget {
                return Err(Error::AllZeroVectors);
            }
            let i = stream.index(count);
            let j = stream.index(count);
            if i == j || norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let a = &flat[i * dim..(i + 1) * dim];
            let b = &flat[j * dim..(j + 1) * dim];
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            sum += dot / (norms[i] * norms[j]);
            break;
        }
    }
    let mean_cosine = sum / config.pairs as f64;
    Ok(CosSimResult {
        score: 1.0 - mean_cosine.abs(),
        mean_cosine,
    })
}

// ------------------------------------------------------------------------
// Partition ratio
// ------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PartitionResult {
    /// `Z_min / Z_max` over the evaluated directions, in `(0, 1]`.
    pub score: f64,
    pub log_z_min: f64,
    pub log_z_max: f64,
}

/// The direction set the partition ratio is evaluated on: eigenvectors of
/// the uncentered second-moment matrix `X^T X`, as columns.
///
/// The second moment is uncentered on purpose. That makes the ratio react
/// to the mean as well as the shape, which is part of the behavior the
/// harness probes.
pub fn partition_directions(cloud: &PointCloud) -> Result<Array2<f64>> {
    let data = cloud.data();
    let n = cloud.dim();
    let mut m = data.t().dot(data);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m[(i, j)];
            m[(j, i)] = v;
        }
    }
    if m.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    Ok(linalg::sym_eigen(&m)?.vectors)
}

/// Partition ratio against a caller-supplied direction set (columns), with
/// both signs of every direction evaluated.
///
/// Supplying the directions makes comparisons across transformed copies of
/// a cloud meaningful: scoring each copy against its own refit directions
/// cancels the transform, because the directions co-rotate with the data.
pub fn partition_score_with_directions(
    cloud: &PointCloud,
    directions: &ArrayView2<f64>,
) -> Result<PartitionResult> {
    if directions.nrows() != cloud.dim() {
        return Err(Error::InvalidConfig(format!(
            "directions live in dimension {}, cloud in {}",
            directions.nrows(),
            cloud.dim()
        )));
    }
    if directions.ncols() == 0 {
        return Err(Error::InvalidConfig("need at least one direction".into()));
    }
    let proj = cloud.data().dot(directions);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for col in proj.columns() {
        for sign in [1.0, -1.0] {
            let lz = log_sum_exp_signed(col, sign);
            lo = lo.min(lz);
            hi = hi.max(lz);
        }
    }
    Ok(PartitionResult {
        score: (lo - hi).exp(),
        log_z_min: lo,
        log_z_max: hi,
    })
}

/// Partition ratio with directions refit from the cloud itself.
pub fn partition_score(cloud: &PointCloud) -> Result<PartitionResult> {
    let dirs = partition_directions(cloud)?;
    partition_score_with_directions(cloud, &dirs.view())
}

/// `log sum_i exp(sign * v_i)`, stabilized by factoring out the maximum.
fn log_sum_exp_signed(values: ArrayView1<f64>, sign: f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &v in values.iter() {
        max = max.max(sign * v);
    }
    let sum: f64 = values.iter().map(|&v| (sign * v - max).exp()).sum();
    max + sum.ln()
}

// ------------------------------------------------------------------------
// Intrinsic-dimension score
// ------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct IdConfig {
    /// Smallest neighbor count used, at least 2.
    pub k_min: usize,
    pub k_max: usize,
    /// Clouds with more points than this are subsampled without
    /// replacement.
    pub subsample: usize,
    pub seed: u64,
}

impl IdConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            k_min: DEFAULT_ID_K_MIN,
            k_max: DEFAULT_ID_K_MAX,
            subsample: DEFAULT_ID_SUBSAMPLE,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdResult {
    /// Estimated intrinsic dimension.
    pub dimension: f64,
    /// `dimension / ambient dimension`, the isotropy reading.
    pub score: f64,
}

/// Maximum-likelihood intrinsic dimension from nearest-neighbor distances.
///
/// For each point and each neighbor count `k`, the local estimate is the
/// reciprocal of the mean log ratio between the `k`-th neighbor distance
/// and the closer ones. Per-point estimates are combined by averaging their
/// reciprocals (a harmonic mean), which keeps a handful of locally flat
/// neighborhoods from blowing up the aggregate, and the per-`k` values are
/// then averaged over `k_min..=k_max`.
pub fn mle_intrinsic_dim(cloud: &PointCloud, config: &IdConfig) -> Result<f64> {
    if config.k_min < 2 || config.k_max < config.k_min {
        return Err(Error::InvalidConfig(format!(
            "neighbor range {}..={} is invalid; need 2 <= k_min <= k_max",
            config.k_min, config.k_max
        )));
    }
    if config.subsample < 2 {
        return Err(Error::InvalidConfig(
            "subsample cap must be at least 2".into(),
        ));
    }

    let sub;
    let x: ArrayView2<f64> = if cloud.count() > config.subsample {
        sub = subsample_rows(cloud, config.subsample, config.seed);
        sub.view()
    } else {
        cloud.data().view()
    };
    let count = x.nrows();
    let k_max = config.k_max.min(count - 1);
    if k_max < config.k_min {
        return Err(Error::TooFewPoints(count));
    }
    let k_min = config.k_min;
    let levels = k_max - k_min + 1;

    let sq: Vec<f64> = x.rows().into_iter().map(|r| r.dot(&r)).collect();

    let mut per_k_sums = vec![0.0f64; levels];
    let mut per_k_counts = vec![0u64; levels];
    let mut degenerate_terms = 0u64;
    let mut total_terms = 0u64;

    let block = 512usize;
    let mut logt = vec![0.0f64; k_max];
    let mut scratch = vec![0.0f64; count];
    for start in (0..count).step_by(block) {
        let end = (start + block).min(count);
        let gram = x.slice(ndarray::s![start..end, ..]).dot(&x.t());
        for r in 0..(end - start) {
            let row = gram.row(r);
            let base = sq[start + r];
            for j in 0..count {
                scratch[j] = (base + sq[j] - 2.0 * row[j]).max(0.0);
            }
            scratch[start + r] = f64::INFINITY;
            // Partial select then sort gives the k_max smallest squared
            // distances in ascending order.
            scratch.select_nth_unstable_by(k_max - 1, f64::total_cmp);
            let nearest = &mut scratch[..k_max];
            nearest.sort_unstable_by(f64::total_cmp);
            for (t, &d2) in logt.iter_mut().zip(nearest.iter()) {
                *t = 0.5 * d2.ln();
            }
            for (ki, k) in (k_min..=k_max).enumerate() {
                let lk = logt[k - 1];
                let mut sum = 0.0f64;
                let mut finite = 0usize;
                for &lj in &logt[..k - 1] {
                    let term = lk - lj;
                    if term.is_finite() {
                        sum += term;
                        finite += 1;
                    }
                }
                total_terms += (k - 1) as u64;
                degenerate_terms += (k - 1 - finite) as u64;
                if finite == k - 1 && sum > 0.0 {
                    per_k_sums[ki] += sum / (k - 1) as f64;
                    per_k_counts[ki] += 1;
                }
            }
        }
    }

    let percent = 100.0 * degenerate_terms as f64 / total_terms as f64;
    if degenerate_terms as f64 > 0.1 * total_terms as f64 {
        return Err(Error::DuplicatePoints { percent });
    }
    let mut acc = 0.0f64;
    for ki in 0..levels {
        if per_k_counts[ki] == 0 {
            return Err(Error::DuplicatePoints { percent });
        }
        acc += per_k_counts[ki] as f64 / per_k_sums[ki];
    }
    Ok(acc / levels as f64)
}

/// Intrinsic dimension divided by ambient dimension.
pub fn id_score(cloud: &PointCloud, config: &IdConfig) -> Result<IdResult> {
    let dimension = mle_intrinsic_dim(cloud, config)?;
    Ok(IdResult {
        dimension,
        score: dimension / cloud.dim() as f64,
    })
}

/// Seeded subsample of `take` distinct rows via a partial Fisher-Yates
/// shuffle.
fn subsample_rows(cloud: &PointCloud, take: usize, seed: u64) -> Array2<f64> {
    let count = cloud.count();
    let dim = cloud.dim();
    let mut idx: Vec<usize> = (0..count).collect();
    let mut stream = Stream::new(seed);
    for i in 0..take {
        let j = i + stream.index(count - i);
        idx.swap(i, j);
    }
    let flat = cloud.flat();
    let mut out = Array2::<f64>::zeros((take, dim));
    for (r, &src) in idx[..take].iter().enumerate() {
        out.row_mut(r)
            .as_slice_mut()
            .expect("standard layout")
            .copy_from_slice(&flat[src * dim..(src + 1) * dim]);
    }
    out
}

// ------------------------------------------------------------------------
// Variance-explained ratio
// ------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct VarExResult {
    /// Explained fraction normalized by `k / n`; 1 reads as isotropic.
    pub score: f64,
    /// Fraction of total variance carried by the top `k` components.
    pub explained: f64,
    pub k: usize,
}

/// Component count used when the caller does not pick one: half the
/// ambient dimension, rounded up.
pub fn default_component_count(n: usize) -> usize {
    n.div_ceil(2)
}

/// Variance-explained ratio from a variance spectrum.
pub fn varex_from_spectrum(variances: &[f64], k: usize) -> Result<VarExResult> {
    let n = variances.len();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    for (index, &value) in variances.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeVariance { index, value });
        }
    }
    let mut sorted = variances.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Err(Error::DegenerateCovariance);
    }
    let explained = sorted[..k].iter().sum::<f64>() / total;
    Ok(VarExResult {
        score: explained * n as f64 / k as f64,
        explained,
        k,
    })
}

/// Variance-explained ratio of a cloud. `k` defaults to half the ambient
/// dimension.
pub fn varex_score(cloud: &PointCloud, k: Option<usize>) -> Result<VarExResult> {
    let spectrum = linalg::sym_eigen(&linalg::covariance(cloud)?)?;
    let k = k.unwrap_or_else(|| default_component_count(cloud.dim()));
    varex_from_spectrum(&spectrum.values, k)
}
