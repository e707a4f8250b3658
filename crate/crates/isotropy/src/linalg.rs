//! Dense symmetric linear algebra: covariance, eigendecomposition, PCA
//! reorientation, and planar rotations.
//!
//! The eigensolver is a cyclic Jacobi iteration. It is slower than LAPACK on
//! large matrices but dependency-free and bit-reproducible across platforms,
//! which the validation harness relies on. Dimensions up to the high
//! hundreds converge in a few sweeps.

use ndarray::{Array1, Array2, Axis};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Relative Frobenius threshold at which the Jacobi sweep stops.
const JACOBI_TOL: f64 = 1e-12;
/// Hard cap on Jacobi sweeps before reporting non-convergence.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative asymmetry tolerated before an input is rejected.
const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-1e-9 * lambda_max, 0)` are treated as rounding noise
/// and clamped to zero.
const EIGEN_CLAMP: f64 = 1e-9;

/// Eigendecomposition of a symmetric matrix, sorted by descending
/// eigenvalue. `vectors` holds the eigenvectors as columns, aligned with
/// `values`.
#[derive(Debug, Clone)]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl EigenSpectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Column means of the cloud.
pub fn mean_vector(cloud: &PointCloud) -> Array1<f64> {
    cloud
        .data()
        .mean_axis(Axis(0))
        .expect("cloud has at least two points")
}

/// Sample covariance matrix with the `N - 1` denominator.
///
/// The result is made exactly symmetric by mirroring the upper triangle, so
/// the eigensolver's symmetry check never trips on accumulated rounding.
pub fn covariance(cloud: &PointCloud) -> Result<Array2<f64>> {
    let n = cloud.dim();
    let count = cloud.count();
    let mean = mean_vector(cloud);
    let centered = cloud.data() - &mean.broadcast((count, n)).expect("broadcast mean");
    let mut cov = centered.t().dot(&centered) / (count as f64 - 1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = cov[(i, j)];
            cov[(j, i)] = v;
        }
    }
    if cov.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    Ok(cov)
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back sorted descending. Tiny negative values caused by
/// rounding are clamped to zero; anything more negative is preserved so a
/// genuinely indefinite input is visible to the caller. Each eigenvector's
/// sign is fixed so its largest-magnitude entry is positive, which makes
/// decompositions comparable across runs.
pub fn sym_eigen(matrix: &Array2<f64>) -> Result<EigenSpectrum> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;

    let max_abs = matrix.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (matrix[(i, j)] - matrix[(j, i)]).abs();
            if diff > SYMMETRY_TOL * max_abs {
                return Err(Error::NotSymmetric { i, j, diff });
            }
        }
    }

    // Work on flat row-major buffers; the index math is simple enough and it
    // keeps the hot rotation loops free of ndarray bounds machinery.
    let mut a: Vec<f64> = matrix.iter().copied().collect();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = JACOBI_TOL * frob.max(f64::MIN_POSITIVE);
    // Entries this small cannot keep the off-diagonal norm above `stop`
    // even if every pair sat at the bound, so rotating them is wasted work.
    let element_stop = stop / (n * (n - 1)) as f64;

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        let off = (2.0 * off).sqrt();
        if off <= stop {
            converged = true;
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= element_stop {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        let new_ip = aip - s * (aiq + tau * aip);
                        let new_iq = aiq + s * (aip - tau * aiq);
                        a[i * n + p] = new_ip;
                        a[p * n + i] = new_ip;
                        a[i * n + q] = new_iq;
                        a[q * n + i] = new_iq;
                    }
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip - s * (viq + tau * vip);
                    v[i * n + q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let lambda_max = values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    for val in values.iter_mut() {
        if *val < 0.0 && *val >= -EIGEN_CLAMP * lambda_max {
            *val = 0.0;
        }
        if *val == 0.0 {
            *val = 0.0; // normalize -0.0 to +0.0
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let mut sorted_values = Vec::with_capacity(n);
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (out_col, &src_col) in order.iter().enumerate() {
        sorted_values.push(values[src_col]);
        // Sign convention: first entry attaining the largest magnitude is
        // made positive.
        let mut best = 0usize;
        let mut best_abs = -1.0f64;
        for i in 0..n {
            let x = v[i * n + src_col].abs();
            if x > best_abs {
                best_abs = x;
                best = i;
            }
        }
        let flip = if v[best * n + src_col] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, out_col)] = flip * v[i * n + src_col];
        }
    }

    Ok(EigenSpectrum {
        values: sorted_values,
        vectors,
    })
}

/// Rotates the cloud onto the principal axes of its covariance, keeping all
/// `n` coordinates. Only the basis changes; no dimension is dropped.
pub fn pca_reorient(cloud: &PointCloud) -> Result<PointCloud> {
    let cov = covariance(cloud)?;
    let spectrum = sym_eigen(&cov)?;
    let rotated = cloud.data().dot(&spectrum.vectors);
    PointCloud::new(rotated)
}

/// Rotates the cloud by `theta_deg` degrees within the plane spanned by the
/// two axes in `plane`, leaving every other coordinate fixed.
pub fn rotate2d_embedded(
    cloud: &PointCloud,
    theta_deg: f64,
    plane: (usize, usize),
) -> Result<PointCloud> {
    let (axis_a, axis_b) = plane;
    let n = cloud.dim();
    if axis_a >= n || axis_b >= n || axis_a == axis_b {
        return Err(Error::BadPlane(axis_a, axis_b, n));
    }
    let (sin, cos) = theta_deg.to_radians().sin_cos();
    let mut data = cloud.data().clone();
    for mut row in data.rows_mut() {
        let x = row[axis_a];
        let y = row[axis_b];
        row[axis_a] = cos * x - sin * y;
        row[axis_b] = sin * x + cos * y;
    }
    PointCloud::new(data)
}
