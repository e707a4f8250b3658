//! Validated point-cloud container.

use ndarray::Array2;

use crate::error::{Error, Result};

/// A finite set of points in `R^n`, one point per row.
///
/// Construction checks the cheap structural invariants once (every entry
/// finite, at least 2 points, dimension at least 2) so downstream numerics
/// never have to. Degenerate clouds (identical points, zero variance) are
/// legal here and are rejected by the operations whose math breaks on them.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Array2<f64>,
}

impl PointCloud {
    /// Wraps a points-by-dimensions matrix, rejecting non-finite entries and
    /// undersized shapes.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (count, dim) = data.dim();
        if count < 2 {
            return Err(Error::TooFewPoints(count));
        }
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        for ((row, col), &v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(Self { data })
    }

    /// Builds a cloud from row vectors; rows must all have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let count = rows.len();
        if count < 2 {
            return Err(Error::TooFewPoints(count));
        }
        let dim = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidConfig(format!(
                    "row {i} has {} entries, expected {dim}",
                    r.len()
                )));
            }
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let data = Array2::from_shape_vec((count, dim), flat)
            .expect("shape checked above");
        Self::new(data)
    }

    /// Number of points (rows).
    pub fn count(&self) -> usize {
        self.data.nrows()
    }

    /// Ambient dimension (columns).
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    /// Row-major flat view of the data; always available because the cloud
    /// is built from an owned standard-layout matrix.
    pub(crate) fn flat(&self) -> &[f64] {
        self.data.as_slice().expect("point cloud is standard layout")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn accepts_finite_matrix() {
        let c = PointCloud::new(array![[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]).unwrap();
        assert_eq!(c.count(), 3);
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn rejects_nan_with_position() {
        let err = PointCloud::new(array![[0.0, 1.0], [2.0, f64::NAN]]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 1, col: 1 });
    }

    #[test]
    fn rejects_single_point() {
        let err = PointCloud::new(array![[0.0, 1.0]]).unwrap_err();
        assert_eq!(err, Error::TooFewPoints(1));
    }

    #[test]
    fn rejects_one_dimensional_points() {
        let err = PointCloud::new(array![[0.0], [1.0]]).unwrap_err();
        assert_eq!(err, Error::DimensionTooSmall(1));
    }

    #[test]
    fn degenerate_cloud_is_legal_input() {
        let c = PointCloud::new(array![[5.0, 5.0], [5.0, 5.0]]).unwrap();
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = PointCloud::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }
}
