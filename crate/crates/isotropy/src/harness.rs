//! The validation harness: six experiments that probe whether each
//! estimator behaves like a true isotropy measure, and the pass/fail matrix
//! summarizing them.
//!
//! Every experiment sweeps one generator parameter, scores every cloud with
//! all five estimators, and applies a named predicate to each score series.
//! The predicates and their thresholds are listed in [`thresholds`] and
//! recorded in the emitted report so verdict sensitivity is auditable.
//!
//! Two scales are supported: `desk` (20,000 points per cloud, thinned
//! sweeps) finishes in a couple of minutes on one core; `paper` (100,000
//! points, dense sweeps) reproduces the reference curves. Sweep grids always
//! keep their endpoints, and the stability sweep always includes the
//! equal-count mixture, so thinning never removes a verdict-critical point.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, CosSimConfig, IdConfig};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::isoscore;
use crate::linalg;
use crate::report::Metric;
use crate::rng::derive_seed;
use crate::synthgen;

/// Named verdict thresholds. These constants define what the qualitative
/// check marks in the summary matrix mean quantitatively.
pub mod thresholds {
    /// Maximum allowed max-minus-min of a score series for the invariance
    /// tests (mean shift, scalar scaling).
    pub const SERIES_SPREAD: f64 = 0.05;
    /// Scalar-invariance additionally requires every score at or above
    /// this.
    pub const SCALAR_FLOOR: f64 = 0.95;
    /// Max-variance: per-step increase tolerated before the series stops
    /// counting as non-increasing.
    pub const MONOTONE_STEP: f64 = 0.01;
    /// Max-variance: the final score must drop to this fraction of the
    /// initial score.
    pub const FINAL_DROP_FRACTION: f64 = 0.2;
    /// Rotation: maximum allowed spread across the four variants.
    pub const ROTATION_SPREAD: f64 = 0.02;
    /// Dimension-fraction: allowed deviation from the target line at every
    /// sweep point.
    pub const FRACTION_TRACKING: f64 = 0.05;
    /// High-dimension: the band the series must stay inside.
    pub const HIGHDIM_FLOOR: f64 = 0.9;
    pub const HIGHDIM_CEIL: f64 = 1.0;
    /// Stability: per-step decrease tolerated before the series stops
    /// counting as non-decreasing.
    pub const STABILITY_STEP: f64 = 0.02;
    /// Stability: required total rise from the first to the last score.
    pub const STABILITY_RISE: f64 = 0.5;
    /// Stability: required final score.
    pub const STABILITY_END: f64 = 0.9;
    /// Stability: the half-way crossing is additionally located and flagged
    /// if it falls outside this relative window around the equal-count
    /// mixture (diagnostic only; the verdict requires the crossing to
    /// exist).
    pub const CROSSING_WINDOW: f64 = 0.25;
}

/// Scale of a harness run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// 20,000 points per cloud, thinned sweep grids.
    Desk,
    /// 100,000 points per cloud, dense sweep grids.
    Paper,
}

/// Everything a harness run depends on; serialized into the report so a run
/// can be replayed exactly.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessConfig {
    pub scale: Scale,
    /// Master seed; per-cloud generation and scoring seeds are derived from
    /// it.
    pub seed: u64,
    pub points_per_cloud: usize,
    pub cosine_pairs: usize,
    pub id_subsample: usize,
}

impl HarnessConfig {
    pub fn new(scale: Scale, seed: u64) -> Self {
        Self {
            scale,
            seed,
            points_per_cloud: match scale {
                Scale::Desk => 20_000,
                Scale::Paper => 100_000,
            },
            cosine_pairs: baselines::DEFAULT_COSINE_PAIRS,
            id_subsample: baselines::DEFAULT_ID_SUBSAMPLE,
        }
    }

    fn gen_seed(&self, test: u64, index: usize) -> u64 {
        derive_seed(self.seed, test * 100_000 + index as u64)
    }

    fn score_seed(&self, test: u64, index: usize) -> u64 {
        derive_seed(self.seed, test * 100_000 + 50_000 + index as u64)
    }
}

/// Identifies one experiment. The dimensions-used test has two halves that
/// share a matrix row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestId {
    #[serde(rename = "1")]
    MeanInvariance,
    #[serde(rename = "2")]
    ScalarInvariance,
    #[serde(rename = "3")]
    MaxVariance,
    #[serde(rename = "4")]
    RotationInvariance,
    #[serde(rename = "5a")]
    DimsUsedFraction,
    #[serde(rename = "5b")]
    DimsUsedHighDim,
    #[serde(rename = "6")]
    GlobalStability,
}

impl TestId {
    pub const ALL: [TestId; 7] = [
        TestId::MeanInvariance,
        TestId::ScalarInvariance,
        TestId::MaxVariance,
        TestId::RotationInvariance,
        TestId::DimsUsedFraction,
        TestId::DimsUsedHighDim,
        TestId::GlobalStability,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TestId::MeanInvariance => "1",
            TestId::ScalarInvariance => "2",
            TestId::MaxVariance => "3",
            TestId::RotationInvariance => "4",
            TestId::DimsUsedFraction => "5a",
            TestId::DimsUsedHighDim => "5b",
            TestId::GlobalStability => "6",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestId::MeanInvariance => "mean_invariance",
            TestId::ScalarInvariance => "scalar_invariance",
            TestId::MaxVariance => "max_variance",
            TestId::RotationInvariance => "rotation_invariance",
            TestId::DimsUsedFraction => "dims_used_fraction",
            TestId::DimsUsedHighDim => "dims_used_highdim",
            TestId::GlobalStability => "global_stability",
        }
    }
}

impl std::str::FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestId::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown test {s:?}; expected 1, 2, 3, 4, 5a, 5b, or 6"
                ))
            })
    }
}

/// Pass/fail for one metric on one test, naming the first predicate that
/// failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated: Option<String>,
}

impl Verdict {
    fn pass() -> Self {
        Self {
            pass: true,
            violated: None,
        }
    }

    fn fail(predicate: impl Into<String>) -> Self {
        Self {
            pass: false,
            violated: Some(predicate.into()),
        }
    }
}

/// The full result of one experiment: the sweep, every metric's score
/// series over it, the verdicts, and any extra diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub test: TestId,
    /// Name of the swept parameter.
    pub sweep: &'static str,
    /// One label per sweep point.
    pub sweep_values: Vec<String>,
    pub scores: BTreeMap<Metric, Vec<f64>>,
    pub verdicts: BTreeMap<Metric, Verdict>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

// --------------------------------------------------------------------
// Scoring plumbing
// --------------------------------------------------------------------

/// Scores one cloud with all five estimators. When `partition_dirs` is
/// given, the partition ratio is evaluated on that fixed direction set
/// instead of directions refit from the cloud.
fn score_all(
    cloud: &PointCloud,
    seed: u64,
    config: &HarnessConfig,
    partition_dirs: Option<&Array2<f64>>,
) -> Result<BTreeMap<Metric, f64>> {
    let mut out = BTreeMap::new();
    out.insert(Metric::Isoscore, isoscore::isoscore(cloud)?.score);
    let cos_cfg = CosSimConfig {
        pairs: config.cosine_pairs,
        seed: derive_seed(seed, 1),
    };
    out.insert(
        Metric::AvgCosSim,
        baselines::avg_cos_sim(cloud, &cos_cfg)?.score,
    );
    let partition = match partition_dirs {
        Some(dirs) => baselines::partition_score_with_directions(cloud, &dirs.view())?,
        None => baselines::partition_score(cloud)?,
    };
    out.insert(Metric::Partition, partition.score);
    let mut id_cfg = IdConfig::new(derive_seed(seed, 2));
    id_cfg.subsample = config.id_subsample;
    out.insert(Metric::IdScore, baselines::id_score(cloud, &id_cfg)?.score);
    out.insert(Metric::Varex, baselines::varex_score(cloud, None)?.score);
    Ok(out)
}

fn series_map() -> BTreeMap<Metric, Vec<f64>> {
    Metric::ALL.into_iter().map(|m| (m, Vec::new())).collect()
}

fn push_scores(series: &mut BTreeMap<Metric, Vec<f64>>, scores: BTreeMap<Metric, f64>) {
    for (metric, value) in scores {
        series.get_mut(&metric).expect("series pre-filled").push(value);
    }
}

// --------------------------------------------------------------------
// Verdict predicates
// --------------------------------------------------------------------

fn spread(series: &[f64]) -> f64 {
    let max = series.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let min = series.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    max - min
}

fn verdict_spread(series: &[f64], limit: f64) -> Verdict {
    if spread(series) <= limit {
        Verdict::pass()
    } else {
        Verdict::fail(format!("series_spread {:.4} > {limit}", spread(series)))
    }
}

fn verdict_spread_with_floor(series: &[f64], limit: f64, floor: f64) -> Verdict {
    let min = series.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if spread(series) > limit {
        Verdict::fail(format!("series_spread {:.4} > {limit}", spread(series)))
    } else if min < floor {
        Verdict::fail(format!("score_floor {min:.4} < {floor}"))
    } else {
        Verdict::pass()
    }
}

fn verdict_monotone_drop(series: &[f64], step_tol: f64, final_fraction: f64) -> Verdict {
    for w in series.windows(2) {
        if w[1] > w[0] + step_tol {
            return Verdict::fail(format!(
                "monotone_nonincreasing: step +{:.4} > {step_tol}",
                w[1] - w[0]
            ));
        }
    }
    let (first, last) = (series[0], series[series.len() - 1]);
    if last > final_fraction * first {
        return Verdict::fail(format!(
            "final_drop {last:.4} > {final_fraction} * {first:.4}"
        ));
    }
    Verdict::pass()
}

fn verdict_tracks_targets(series: &[f64], targets: &[f64], tol: f64) -> Verdict {
    for (v, t) in series.iter().zip(targets) {
        if (v - t).abs() > tol {
            return Verdict::fail(format!(
                "target_tracking |{v:.4} - {t:.4}| > {tol}"
            ));
        }
    }
    Verdict::pass()
}

fn verdict_band(series: &[f64], lo: f64, hi: f64) -> Verdict {
    for &v in series {
        if v < lo || v > hi {
            return Verdict::fail(format!("band {v:.4} outside [{lo}, {hi}]"));
        }
    }
    Verdict::pass()
}

/// Stability verdict: the series must rise monotonically (within a step
/// tolerance) from its anisotropic start to at least
/// [`thresholds::STABILITY_END`], gaining at least
/// [`thresholds::STABILITY_RISE`] overall, and must cross one half
/// somewhere. Returns the interpolated crossing position when one exists.
fn verdict_stability(series: &[f64], sweep: &[usize]) -> (Verdict, Option<f64>) {
    let crossing = series.windows(2).zip(sweep.windows(2)).find_map(|(v, b)| {
        if v[0] < 0.5 && v[1] >= 0.5 {
            let f = (0.5 - v[0]) / (v[1] - v[0]);
            Some(b[0] as f64 + f * (b[1] - b[0]) as f64)
        } else {
            None
        }
    });
    for w in series.windows(2) {
        if w[1] < w[0] - thresholds::STABILITY_STEP {
            return (
                Verdict::fail(format!(
                    "monotone_nondecreasing: step {:.4}",
                    w[1] - w[0]
                )),
                crossing,
            );
        }
    }
    let (first, last) = (series[0], series[series.len() - 1]);
    if last - first < thresholds::STABILITY_RISE {
        return (
            Verdict::fail(format!("rise {:.4} < {}", last - first, thresholds::STABILITY_RISE)),
            crossing,
        );
    }
    if last < thresholds::STABILITY_END {
        return (
            Verdict::fail(format!("end_level {last:.4} < {}", thresholds::STABILITY_END)),
            crossing,
        );
    }
    if crossing.is_none() {
        return (Verdict::fail("crossing: series never passes 0.5"), None);
    }
    (Verdict::pass(), crossing)
}

// --------------------------------------------------------------------
// The six experiments
// --------------------------------------------------------------------

/// Sweeps the common mean of an isotropic 10-dimensional Gaussian. A real
/// isotropy measure must not move.
pub fn test_mean_invariance(config: &HarnessConfig) -> Result<TestOutcome> {
    let n = 10;
    let mus: Vec<usize> = match config.scale {
        Scale::Desk => (0..=20).step_by(2).collect(),
        Scale::Paper => (0..=20).collect(),
    };
    let mut series = series_map();
    for (i, &mu) in mus.iter().enumerate() {
        let cloud = synthgen::sample_gaussian_diag(
            &vec![mu as f64; n],
            &vec![1.0; n],
            config.points_per_cloud,
            config.gen_seed(1, i),
        )?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(1, i), config, None)?);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| (m, verdict_spread(v, thresholds::SERIES_SPREAD)))
        .collect();
    Ok(TestOutcome {
        test: TestId::MeanInvariance,
        sweep: "mean",
        sweep_values: mus.iter().map(|m| m.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics: BTreeMap::new(),
    })
}

/// Sweeps the scalar covariance of a mean-shifted 5-dimensional Gaussian.
/// Scores must stay put and stay near 1.
pub fn test_scalar_invariance(config: &HarnessConfig) -> Result<TestOutcome> {
    let n = 5;
    let lambdas: Vec<usize> = match config.scale {
        Scale::Desk => (1..=25).step_by(3).collect(),
        Scale::Paper => (1..=25).collect(),
    };
    let mut series = series_map();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let cloud = synthgen::sample_gaussian_diag(
            &vec![3.0; n],
            &vec![lambda as f64; n],
            config.points_per_cloud,
            config.gen_seed(2, i),
        )?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(2, i), config, None)?);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| {
            (
                m,
                verdict_spread_with_floor(v, thresholds::SERIES_SPREAD, thresholds::SCALAR_FLOOR),
            )
        })
        .collect();
    Ok(TestOutcome {
        test: TestId::ScalarInvariance,
        sweep: "lambda",
        sweep_values: lambdas.iter().map(|l| l.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics: BTreeMap::new(),
    })
}

/// Inflates one axis of a 10-dimensional Gaussian. Scores must fall toward
/// the anisotropic extreme.
pub fn test_max_variance(config: &HarnessConfig) -> Result<TestOutcome> {
    let n = 10;
    let xs: Vec<usize> = match config.scale {
        Scale::Desk => vec![1, 5, 10, 15, 20, 25, 30, 40, 50, 60, 75],
        Scale::Paper => (1..=75).step_by(2).collect(),
    };
    let mut series = series_map();
    for (i, &x) in xs.iter().enumerate() {
        let mut cov = vec![1.0; n];
        cov[0] = x as f64;
        let cloud = synthgen::sample_gaussian_diag(
            &vec![0.0; n],
            &cov,
            config.points_per_cloud,
            config.gen_seed(3, i),
        )?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(3, i), config, None)?);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| {
            (
                m,
                verdict_monotone_drop(v, thresholds::MONOTONE_STEP, thresholds::FINAL_DROP_FRACTION),
            )
        })
        .collect();
    Ok(TestOutcome {
        test: TestId::MaxVariance,
        sweep: "max_variance",
        sweep_values: xs.iter().map(|x| x.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics: BTreeMap::new(),
    })
}

/// Point count for the rotation test; fixed at the dense scale on both
/// harness scales because the published reference values are tight.
const ROTATION_POINTS: usize = 100_000;

/// Scores a correlated 2D Gaussian, two rotated copies, and its PCA
/// reorientation. A real isotropy measure gives all four the same score.
///
/// The partition ratio is evaluated on the direction set fit to the base
/// cloud. Refitting directions per copy would cancel the rotation exactly
/// (the directions co-rotate with the data); the fixed direction set is
/// what exposes the ratio's frame dependence. The refit scores are kept as
/// a diagnostic. The sampled estimators reuse one scoring seed across the
/// four variants so the comparison isolates the rotation.
pub fn test_rotation_invariance(config: &HarnessConfig) -> Result<TestOutcome> {
    let base = synthgen::sample_correlated_2d(0.8, ROTATION_POINTS, config.gen_seed(4, 0), None)?;
    let r120 = linalg::rotate2d_embedded(&base, 120.0, (0, 1))?;
    let r240 = linalg::rotate2d_embedded(&base, 240.0, (0, 1))?;
    let pca = linalg::pca_reorient(&base)?;
    let anchor_dirs = baselines::partition_directions(&base)?;

    let variants: [(&str, &PointCloud); 4] =
        [("0", &base), ("120", &r120), ("240", &r240), ("pca", &pca)];
    let mut series = series_map();
    let mut refit = Vec::with_capacity(4);
    let seed = config.score_seed(4, 0);
    for (_, cloud) in &variants {
        push_scores(&mut series, score_all(cloud, seed, config, Some(&anchor_dirs))?);
        refit.push(baselines::partition_score(cloud)?.score);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| (m, verdict_spread(v, thresholds::ROTATION_SPREAD)))
        .collect();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(
        "partition_refit".to_string(),
        serde_json::json!(refit),
    );
    diagnostics.insert(
        "points".to_string(),
        serde_json::json!(ROTATION_POINTS),
    );
    Ok(TestOutcome {
        test: TestId::RotationInvariance,
        sweep: "variant",
        sweep_values: variants.iter().map(|(l, _)| l.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics,
    })
}

/// Sweeps the number of axes a 25-dimensional Gaussian actually uses. The
/// score must track the utilized fraction `(k - 1) / (n - 1)`.
pub fn test_dims_used_fraction(config: &HarnessConfig) -> Result<TestOutcome> {
    let n = 25;
    let ks: Vec<usize> = match config.scale {
        Scale::Desk => (1..=25).step_by(2).collect(),
        Scale::Paper => (1..=25).collect(),
    };
    let targets: Vec<f64> = ks.iter().map(|&k| (k as f64 - 1.0) / 24.0).collect();
    let mut series = series_map();
    for (i, &k) in ks.iter().enumerate() {
        let cloud = synthgen::sample_ink(n, k, config.points_per_cloud, config.gen_seed(5, i))?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(5, i), config, None)?);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| (m, verdict_tracks_targets(v, &targets, thresholds::FRACTION_TRACKING)))
        .collect();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("targets".to_string(), serde_json::json!(targets));
    Ok(TestOutcome {
        test: TestId::DimsUsedFraction,
        sweep: "k",
        sweep_values: ks.iter().map(|k| k.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics,
    })
}

/// Sweeps the ambient dimension of a fully isotropic Gaussian. Scores must
/// stay near 1 no matter how high the dimension grows.
pub fn test_dims_used_highdim(config: &HarnessConfig) -> Result<TestOutcome> {
    let ns = [2usize, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100];
    let mut series = series_map();
    for (i, &n) in ns.iter().enumerate() {
        let cloud = synthgen::sample_gaussian_diag(
            &vec![0.0; n],
            &vec![1.0; n],
            config.points_per_cloud,
            config.gen_seed(6, i),
        )?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(6, i), config, None)?);
    }
    let verdicts = series
        .iter()
        .map(|(&m, v)| {
            (m, verdict_band(v, thresholds::HIGHDIM_FLOOR, thresholds::HIGHDIM_CEIL))
        })
        .collect();
    Ok(TestOutcome {
        test: TestId::DimsUsedHighDim,
        sweep: "n",
        sweep_values: ns.iter().map(|n| n.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics: BTreeMap::new(),
    })
}

/// Line points in every stability-test mixture.
const STABILITY_LINE_COUNT: usize = 1_000;
/// Ball counts swept by the stability test, spanning pure line to
/// ball-dominated, with the equal-count landmark included.
const STABILITY_BALL_GRID: [usize; 14] = [
    0, 250, 500, 750, 1_000, 1_250, 1_500, 2_500, 5_000, 10_000, 25_000, 50_000, 100_000, 150_000,
];

/// Grows an isotropic ball around a fixed 1,000-point line. A global
/// estimator must climb from near 0 to near 1 and pass one half on the
/// way; the interpolated crossing should sit near the equal-count mixture.
pub fn test_global_stability(config: &HarnessConfig) -> Result<TestOutcome> {
    let balls = STABILITY_BALL_GRID;
    let mut series = series_map();
    for (i, &ball) in balls.iter().enumerate() {
        let cloud =
            synthgen::sample_skewered_meatball(STABILITY_LINE_COUNT, ball, config.gen_seed(7, i))?;
        push_scores(&mut series, score_all(&cloud, config.score_seed(7, i), config, None)?);
    }
    let mut verdicts = BTreeMap::new();
    let mut crossings = BTreeMap::new();
    let mut within = BTreeMap::new();
    for (&metric, values) in &series {
        let (verdict, crossing) = verdict_stability(values, &balls);
        verdicts.insert(metric, verdict);
        let window = thresholds::CROSSING_WINDOW * STABILITY_LINE_COUNT as f64;
        within.insert(
            metric.name(),
            crossing.map(|c| (c - STABILITY_LINE_COUNT as f64).abs() <= window),
        );
        crossings.insert(metric.name(), crossing);
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("crossing_ball_count".to_string(), serde_json::json!(crossings));
    diagnostics.insert(
        "crossing_within_window".to_string(),
        serde_json::json!(within),
    );
    diagnostics.insert(
        "equal_count".to_string(),
        serde_json::json!(STABILITY_LINE_COUNT),
    );
    Ok(TestOutcome {
        test: TestId::GlobalStability,
        sweep: "ball_count",
        sweep_values: balls.iter().map(|b| b.to_string()).collect(),
        scores: series,
        verdicts,
        diagnostics,
    })
}

/// Runs one experiment by id.
pub fn run_test(config: &HarnessConfig, test: TestId) -> Result<TestOutcome> {
    match test {
        TestId::MeanInvariance => test_mean_invariance(config),
        TestId::ScalarInvariance => test_scalar_invariance(config),
        TestId::MaxVariance => test_max_variance(config),
        TestId::RotationInvariance => test_rotation_invariance(config),
        TestId::DimsUsedFraction => test_dims_used_fraction(config),
        TestId::DimsUsedHighDim => test_dims_used_highdim(config),
        TestId::GlobalStability => test_global_stability(config),
    }
}

/// Runs all seven experiments in order.
pub fn run_all(config: &HarnessConfig) -> Result<Vec<TestOutcome>> {
    TestId::ALL
        .into_iter()
        .map(|t| run_test(config, t))
        .collect()
}

// --------------------------------------------------------------------
// Matrix and report emission
// --------------------------------------------------------------------

/// One row of the summary matrix.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub test: &'static str,
    pub name: &'static str,
    pub cells: BTreeMap<Metric, bool>,
}

/// The 6-by-5 pass/fail summary: six experiments against five estimators.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreMatrix {
    pub rows: Vec<MatrixRow>,
}

impl ScoreMatrix {
    /// True when the given metric passes every row.
    pub fn column_all_pass(&self, metric: Metric) -> bool {
        self.rows.iter().all(|r| r.cells[&metric])
    }
}

/// Folds the seven outcomes into the six-row matrix. The two
/// dimensions-used halves share a row: a metric passes it only if it passes
/// both.
pub fn build_score_matrix(outcomes: &[TestOutcome]) -> Result<ScoreMatrix> {
    let find = |id: TestId| -> Result<&TestOutcome> {
        outcomes
            .iter()
            .find(|o| o.test == id)
            .ok_or(Error::MissingOutcome(id.label()))
    };
    let single_rows = [
        ("1", TestId::MeanInvariance),
        ("2", TestId::ScalarInvariance),
        ("3", TestId::MaxVariance),
        ("4", TestId::RotationInvariance),
    ];
    let mut rows = Vec::with_capacity(6);
    for (label, id) in single_rows {
        let outcome = find(id)?;
        rows.push(MatrixRow {
            test: label,
            name: id.name(),
            cells: Metric::ALL
                .into_iter()
                .map(|m| (m, outcome.verdicts[&m].pass))
                .collect(),
        });
    }
    let fraction = find(TestId::DimsUsedFraction)?;
    let highdim = find(TestId::DimsUsedHighDim)?;
    rows.push(MatrixRow {
        test: "5",
        name: "dims_used",
        cells: Metric::ALL
            .into_iter()
            .map(|m| {
                (
                    m,
                    fraction.verdicts[&m].pass && highdim.verdicts[&m].pass,
                )
            })
            .collect(),
    });
    let stability = find(TestId::GlobalStability)?;
    rows.push(MatrixRow {
        test: "6",
        name: TestId::GlobalStability.name(),
        cells: Metric::ALL
            .into_iter()
            .map(|m| (m, stability.verdicts[&m].pass))
            .collect(),
    });
    Ok(ScoreMatrix { rows })
}

/// True when the isotropy score passes every outcome present. This is the
/// regression signal the command-line harness exits nonzero on.
pub fn isoscore_all_pass(outcomes: &[TestOutcome]) -> bool {
    outcomes
        .iter()
        .all(|o| o.verdicts[&Metric::Isoscore].pass)
}

/// Paths written by [`write_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub report: PathBuf,
    pub curves: PathBuf,
}

/// Notes appended to every report about verdicts that are deliberately
/// narrower than they may look.
const REPORT_NOTES: [&str; 2] = [
    "rotation test: avg_cos_sim and varex are judged on spread across the four \
     variants only; their absolute levels on correlated clouds are not assessed \
     by this test",
    "stability test: the verdict requires the half-way crossing to exist; its \
     position relative to the equal-count window is reported as a diagnostic",
];

fn thresholds_json() -> serde_json::Value {
    serde_json::json!({
        "series_spread": thresholds::SERIES_SPREAD,
        "scalar_floor": thresholds::SCALAR_FLOOR,
        "monotone_step": thresholds::MONOTONE_STEP,
        "final_drop_fraction": thresholds::FINAL_DROP_FRACTION,
        "rotation_spread": thresholds::ROTATION_SPREAD,
        "fraction_tracking": thresholds::FRACTION_TRACKING,
        "highdim_floor": thresholds::HIGHDIM_FLOOR,
        "highdim_ceil": thresholds::HIGHDIM_CEIL,
        "stability_step": thresholds::STABILITY_STEP,
        "stability_rise": thresholds::STABILITY_RISE,
        "stability_end": thresholds::STABILITY_END,
        "crossing_window": thresholds::CROSSING_WINDOW,
    })
}

/// Writes `report.json` and `curves.csv` into `out_dir` (created if
/// absent). The matrix is included when all seven outcomes are present and
/// omitted for partial runs.
pub fn write_report(
    config: &HarnessConfig,
    outcomes: &[TestOutcome],
    out_dir: &Path,
) -> std::io::Result<ReportFiles> {
    std::fs::create_dir_all(out_dir)?;
    let matrix = build_score_matrix(outcomes).ok();
    let doc = serde_json::json!({
        "config": config,
        "thresholds": thresholds_json(),
        "outcomes": outcomes,
        "matrix": matrix,
        "notes": REPORT_NOTES,
    });
    let report = out_dir.join("report.json");
    let mut file = std::fs::File::create(&report)?;
    serde_json::to_writer_pretty(&mut file, &doc)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    file.write_all(b"\n")?;

    let curves = out_dir.join("curves.csv");
    let mut csv = String::from("test,metric,sweep_value,score\n");
    for outcome in outcomes {
        for metric in Metric::ALL {
            for (label, score) in outcome.sweep_values.iter().zip(&outcome.scores[&metric]) {
                csv.push_str(&format!(
                    "{},{},{},{:.16e}\n",
                    outcome.test.label(),
                    metric,
                    label,
                    score
                ));
            }
        }
    }
    std::fs::write(&curves, csv)?;
    Ok(ReportFiles { report, curves })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_outcome(test: TestId, pass: bool) -> TestOutcome {
        let scores: BTreeMap<Metric, Vec<f64>> =
            Metric::ALL.into_iter().map(|m| (m, vec![0.5, 0.5])).collect();
        let verdicts = Metric::ALL
            .into_iter()
            .map(|m| {
                let v = if pass {
                    Verdict::pass()
                } else {
                    Verdict::fail("band 0.5 outside [0.9, 1]")
                };
                (m, v)
            })
            .collect();
        TestOutcome {
            test,
            sweep: "x",
            sweep_values: vec!["0".into(), "1".into()],
            scores,
            verdicts,
            diagnostics: BTreeMap::new(),
        }
    }

    #[test]
    fn spread_and_band_predicates() {
        assert!(verdict_spread(&[0.5, 0.52, 0.49], 0.05).pass);
        assert!(!verdict_spread(&[0.5, 0.58], 0.05).pass);
        assert!(verdict_band(&[0.95, 0.99], 0.9, 1.0).pass);
        let v = verdict_band(&[0.95, 0.85], 0.9, 1.0);
        assert!(!v.pass);
        assert!(v.violated.unwrap().starts_with("band"));
    }

    #[test]
    fn floor_predicate_requires_both_conditions() {
        assert!(verdict_spread_with_floor(&[0.97, 0.99], 0.05, 0.95).pass);
        assert!(!verdict_spread_with_floor(&[0.90, 0.91], 0.05, 0.95).pass);
        assert!(!verdict_spread_with_floor(&[0.95, 1.0, 0.96], 0.04, 0.95).pass);
    }

    #[test]
    fn monotone_drop_predicate() {
        assert!(verdict_monotone_drop(&[1.0, 0.6, 0.3, 0.1], 0.01, 0.2).pass);
        // Rises too much mid-series.
        assert!(!verdict_monotone_drop(&[1.0, 0.6, 0.65, 0.1], 0.01, 0.2).pass);
        // Never falls far enough.
        assert!(!verdict_monotone_drop(&[1.0, 0.9, 0.8], 0.01, 0.2).pass);
    }

    #[test]
    fn stability_predicate_and_crossing_interpolation() {
        let sweep = [0usize, 1000, 2000];
        let (v, cross) = verdict_stability(&[0.0, 0.4, 0.95], &sweep);
        assert!(v.pass);
        // Crossing interpolates between 1000 and 2000: 0.4 -> 0.95.
        let expected = 1000.0 + 1000.0 * (0.5 - 0.4) / (0.95 - 0.4);
        assert!((cross.unwrap() - expected).abs() < 1e-9);

        let (v, cross) = verdict_stability(&[0.6, 0.8, 0.95], &sweep);
        assert!(!v.pass, "no crossing: starts above 0.5");
        assert!(cross.is_none());

        let (v, _) = verdict_stability(&[0.0, 0.6, 0.5], &sweep);
        assert!(!v.pass, "dips beyond tolerance");
    }

    #[test]
    fn matrix_merges_the_two_dims_used_halves() {
        let mut outcomes: Vec<TestOutcome> = TestId::ALL
            .into_iter()
            .map(|t| fake_outcome(t, true))
            .collect();
        // Fail only the high-dimensional half for one metric.
        outcomes[5]
            .verdicts
            .insert(Metric::Varex, Verdict::fail("band"));
        let matrix = build_score_matrix(&outcomes).unwrap();
        assert_eq!(matrix.rows.len(), 6);
        assert!(!matrix.rows[4].cells[&Metric::Varex]);
        assert!(matrix.rows[4].cells[&Metric::Isoscore]);
        assert!(matrix.column_all_pass(Metric::Isoscore));
        assert!(!matrix.column_all_pass(Metric::Varex));
    }

    #[test]
    fn matrix_requires_every_outcome() {
        let outcomes: Vec<TestOutcome> = TestId::ALL
            .into_iter()
            .take(6)
            .map(|t| fake_outcome(t, true))
            .collect();
        assert_eq!(
            build_score_matrix(&outcomes).unwrap_err(),
            Error::MissingOutcome("6")
        );
    }

    #[test]
    fn report_files_are_written_and_parse() {
        let outcomes: Vec<TestOutcome> = TestId::ALL
            .into_iter()
            .map(|t| fake_outcome(t, true))
            .collect();
        let config = HarnessConfig::new(Scale::Desk, 0);
        let dir = tempfile::tempdir().unwrap();
        let files = write_report(&config, &outcomes, dir.path()).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&files.report).unwrap()).unwrap();
        assert!(doc["matrix"]["rows"].as_array().unwrap().len() == 6);
        assert_eq!(doc["config"]["scale"], "desk");
        assert!(doc["thresholds"]["rotation_spread"].as_f64().unwrap() > 0.0);
        let curves = std::fs::read_to_string(&files.curves).unwrap();
        // Header plus 7 tests x 5 metrics x 2 sweep points.
        assert_eq!(curves.lines().count(), 1 + 7 * 5 * 2);
        assert!(curves.starts_with("test,metric,sweep_value,score"));
    }

    #[test]
    fn test_ids_parse_from_labels() {
        for t in TestId::ALL {
            assert_eq!(t.label().parse::<TestId>().unwrap(), t);
        }
        assert!("7".parse::<TestId>().is_err());
    }

    #[test]
    fn seeds_differ_across_tests_and_indices() {
        let config = HarnessConfig::new(Scale::Desk, 3);
        assert_ne!(config.gen_seed(1, 0), config.gen_seed(1, 1));
        assert_ne!(config.gen_seed(1, 0), config.gen_seed(2, 0));
        assert_ne!(config.gen_seed(1, 0), config.score_seed(1, 0));
    }
}
