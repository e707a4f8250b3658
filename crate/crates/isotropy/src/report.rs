//! Shared scoring vocabulary: metric identities and per-metric report
//! entries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five estimators, in the column order every table and report uses.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Isoscore,
    AvgCosSim,
    Partition,
    IdScore,
    Varex,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Isoscore,
        Metric::AvgCosSim,
        Metric::Partition,
        Metric::IdScore,
        Metric::Varex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Isoscore => "isoscore",
            Metric::AvgCosSim => "avg_cos_sim",
            Metric::Partition => "partition",
            Metric::IdScore => "id_score",
            Metric::Varex => "varex",
        }
    }

    /// True for the estimators that consume randomness and therefore need a
    /// seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Metric::AvgCosSim | Metric::IdScore)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown metric {s:?}; expected one of isoscore, avg_cos_sim, \
                     partition, id_score, varex"
                ))
            })
    }
}

/// One evaluated metric with the parameters it ran under and whatever
/// intermediate numbers the estimator produced, ready for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub metric: Metric,
    pub value: f64,
    /// Parameters the estimator ran under (pair count, seed, neighbor
    /// range, component count); null for parameter-free estimators.
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
    /// Estimator-specific extras (mean cosine, partition bounds, and so
    /// on); null when there are none.
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl MetricReport {
    /// Wraps an evaluated metric, rejecting values outside the metric's
    /// documented range so malformed numbers never reach serialized output.
    ///
    /// The isotropy, cosine, and partition scores live in `[0, 1]`; the
    /// intrinsic-dimension and variance-explained scores may exceed 1 and
    /// are only required to be finite.
    pub fn new(
        metric: Metric,
        value: f64,
        config: serde_json::Value,
        details: serde_json::Value,
    ) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "metric {metric} produced a non-finite value"
            )));
        }
        let unit_range = matches!(
            metric,
            Metric::Isoscore | Metric::AvgCosSim | Metric::Partition
        );
        if unit_range && !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidConfig(format!(
                "metric {metric} produced {value}, outside [0, 1]"
            )));
        }
        Ok(Self {
            metric,
            value,
            config,
            details,
        })
    }
}
