//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("ambient dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("degenerate covariance: no direction carries variance")]
    DegenerateCovariance,

    #[error("negative variance entry {value:e} at index {index}")]
    NegativeVariance { index: usize, value: f64 },

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix not symmetric: entries ({i},{j}) and ({j},{i}) differ by {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("rotation plane ({0}, {1}) out of range for dimension {2}")]
    BadPlane(usize, usize, usize),

    #[error("could not draw enough index pairs with nonzero norms (cloud may be all zeros)")]
    AllZeroVectors,

    #[error("{percent:.1}% of neighbor distance ratios are degenerate; too many duplicate points")]
    DuplicatePoints { percent: f64 },

    #[error("k must lie in 1..={n}, got {k}")]
    BadK { k: usize, n: usize },

    #[error("correlation must lie strictly inside (-1, 1), got {0}")]
    BadCorrelation(f64),

    #[error("mixture needs at least 2 points, got {0}")]
    Empty(usize),

    #[error("score matrix needs all six test outcomes; missing {0}")]
    MissingOutcome(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
