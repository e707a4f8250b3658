//! Seeded synthetic point-cloud generators for every distribution the
//! validation harness sweeps.
//!
//! Each generator is a pure function of its parameters and seed: the same
//! inputs produce the same cloud byte for byte, on any platform. That makes
//! generated clouds usable as regression fixtures.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::Stream;

/// Half-length of the skewered-meatball line segment.
///
/// Points are spaced evenly over `[-extent, extent]` along the unit
/// diagonal, giving the line a variance of about 3, the same total variance
/// as the unit ball it skewers. Matching the two puts the mixture's
/// half-isotropic point where the line and ball have equal point counts,
/// which is the landmark the stability test checks for.
pub const MEATBALL_LINE_EXTENT: f64 = 3.0;

/// Poisson rate for the isotropic non-Gaussian family.
pub const POISSON_RATE: f64 = 4.0;
/// Student-t degrees of freedom (must exceed 2 so the variance is finite).
pub const STUDENT_T_DOF: u32 = 5;
/// Chi-square degrees of freedom.
pub const CHI_SQUARE_DOF: u32 = 3;

/// Every cloud family the generator knows how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GaussianDiag,
    GaussianCorr2d,
    Ink,
    #[serde(alias = "meatball")]
    SkeweredMeatball,
    Uniform,
    Poisson,
    StudentT,
    ChiSquare,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GaussianDiag => "gaussian_diag",
            Family::GaussianCorr2d => "gaussian_corr2d",
            Family::Ink => "ink",
            Family::SkeweredMeatball => "skewered_meatball",
            Family::Uniform => "uniform",
            Family::Poisson => "poisson",
            Family::StudentT => "student_t",
            Family::ChiSquare => "chi_square",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The four families with i.i.d. coordinates and covariance proportional to
/// the identity, used to check that isotropy readings do not assume
/// Gaussian data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IidFamily {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Poisson with rate [`POISSON_RATE`].
    Poisson,
    /// Student-t with [`STUDENT_T_DOF`] degrees of freedom.
    StudentT,
    /// Chi-square with [`CHI_SQUARE_DOF`] degrees of freedom.
    ChiSquare,
}

impl Family {
    fn as_iid(self) -> Option<IidFamily> {
        match self {
            Family::Uniform => Some(IidFamily::Uniform),
            Family::Poisson => Some(IidFamily::Poisson),
            Family::StudentT => Some(IidFamily::StudentT),
            Family::ChiSquare => Some(IidFamily::ChiSquare),
            _ => None,
        }
    }
}

/// A point count: one number for plain families, a `[line, ball]` pair for
/// the skewered-meatball mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    Single(usize),
    Pair([usize; 2]),
}

/// A per-coordinate parameter given either as one shared scalar or as a
/// full length-`n` vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl ScalarOrVec {
    fn resolve(&self, n: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(s) => Ok(vec![*s; n]),
            ScalarOrVec::Vector(v) if v.len() == n => Ok(v.clone()),
            ScalarOrVec::Vector(v) => Err(Error::InvalidConfig(format!(
                "{field} has {} entries, expected {n}",
                v.len()
            ))),
        }
    }
}

/// A complete, serializable description of one synthetic cloud. Fields that
/// a family does not use must be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub family: Family,
    /// Ambient dimension; optional for the two families that imply it
    /// (correlated 2D defaults to 2, the meatball is always 3D).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub count: Counts,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<ScalarOrVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov_diag: Option<ScalarOrVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Planar rotation in the first two coordinates, applied after
    /// sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_deg: Option<f64>,
}

impl SyntheticSpec {
    fn single_count(&self) -> Result<usize> {
        match self.count {
            Counts::Single(c) => Ok(c),
            Counts::Pair(_) => Err(Error::InvalidConfig(format!(
                "family {} takes a single count, not a [line, ball] pair",
                self.family
            ))),
        }
    }

    fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| {
            Error::InvalidConfig(format!("family {} requires the dimension n", self.family))
        })
    }

    fn reject_unused(&self) -> Result<()> {
        let mut stray = Vec::new();
        let uses_mean_cov = self.family == Family::GaussianDiag;
        if self.mean.is_some() && !uses_mean_cov {
            stray.push("mean");
        }
        if self.cov_diag.is_some() && !uses_mean_cov {
            stray.push("cov_diag");
        }
        if self.corr.is_some() && self.family != Family::GaussianCorr2d {
            stray.push("corr");
        }
        if self.k.is_some() && self.family != Family::Ink {
            stray.push("k");
        }
        if self.n.is_some() && self.family == Family::SkeweredMeatball {
            stray.push("n");
        }
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "family {} does not use field(s): {}",
                self.family,
                stray.join(", ")
            )))
        }
    }
}

/// Samples the cloud a [`SyntheticSpec`] describes.
pub fn generate(spec: &SyntheticSpec) -> Result<PointCloud> {
    spec.reject_unused()?;
    let cloud = match spec.family {
        Family::GaussianDiag => {
            let n = spec.require_n()?;
            let mean = match &spec.mean {
                Some(m) => m.resolve(n, "mean")?,
                None => vec![0.0; n],
            };
            let cov_diag = match &spec.cov_diag {
                Some(c) => c.resolve(n, "cov_diag")?,
                None => vec![1.0; n],
            };
            sample_gaussian_diag(&mean, &cov_diag, spec.single_count()?, spec.seed)?
        }
        Family::GaussianCorr2d => {
            let corr = spec.corr.ok_or_else(|| {
                Error::InvalidConfig("family gaussian_corr2d requires corr".into())
            })?;
            sample_correlated_2d(corr, spec.single_count()?, spec.seed, spec.n)?
        }
        Family::Ink => {
            let n = spec.require_n()?;
            let k = spec
                .k
                .ok_or_else(|| Error::InvalidConfig("family ink requires k".into()))?;
            sample_ink(n, k, spec.single_count()?, spec.seed)?
        }
        Family::SkeweredMeatball => match spec.count {
            Counts::Pair([line, ball]) => sample_skewered_meatball(line, ball, spec.seed)?,
            Counts::Single(_) => {
                return Err(Error::InvalidConfig(
                    "family skewered_meatball takes count = [line, ball]".into(),
                ))
            }
        },
        family => {
            let iid = family.as_iid().expect("remaining families are iid");
            sample_isotropic_nongaussian(iid, spec.require_n()?, spec.single_count()?, spec.seed)?
        }
    };
    match spec.rotation_deg {
        Some(deg) => linalg::rotate2d_embedded(&cloud, deg, (0, 1)),
        None => Ok(cloud),
    }
}

/// Gaussian with the given mean and diagonal covariance. Coordinates whose
/// variance entry is zero are exactly the mean, with no random draw spent.
pub fn sample_gaussian_diag(
    mean: &[f64],
    cov_diag: &[f64],
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    let n = mean.len();
    if cov_diag.len() != n {
        return Err(Error::InvalidConfig(format!(
            "mean has {n} entries but cov_diag has {}",
            cov_diag.len()
        )));
    }
    for (index, &value) in cov_diag.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeVariance { index, value });
        }
    }
    let sd: Vec<f64> = cov_diag.iter().map(|v| v.sqrt()).collect();
    let mut stream = Stream::new(seed);
    let mut data = Array2::<f64>::zeros((count, n));
    for mut row in data.rows_mut() {
        for j in 0..n {
            row[j] = if sd[j] == 0.0 {
                mean[j]
            } else {
                mean[j] + sd[j] * stream.normal()
            };
        }
    }
    PointCloud::new(data)
}

/// Zero-mean Gaussian that uses exactly `k` of `n` axes: unit variance on
/// the first `k` coordinates, zero on the rest.
pub fn sample_ink(n: usize, k: usize, count: usize, seed: u64) -> Result<PointCloud> {
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut cov_diag = vec![0.0; n];
    cov_diag[..k].fill(1.0);
    sample_gaussian_diag(&vec![0.0; n], &cov_diag, count, seed)
}

/// Zero-mean 2D Gaussian with unit variances and the given correlation,
/// optionally embedded in the first two coordinates of a larger space.
pub fn sample_correlated_2d(
    corr: f64,
    count: usize,
    seed: u64,
    embed_n: Option<usize>,
) -> Result<PointCloud> {
    if !corr.is_finite() || corr.abs() >= 1.0 {
        return Err(Error::BadCorrelation(corr));
    }
    let n = embed_n.unwrap_or(2);
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    // Cholesky factor of [[1, corr], [corr, 1]].
    let c2 = (1.0 - corr * corr).sqrt();
    let mut stream = Stream::new(seed);
    let mut data = Array2::<f64>::zeros((count, n));
    for mut row in data.rows_mut() {
        let z0 = stream.normal();
        let z1 = stream.normal();
        row[0] = z0;
        row[1] = corr * z0 + c2 * z1;
    }
    PointCloud::new(data)
}

/// A line of evenly spaced points along the unit diagonal of `R^3`, plus a
/// standard Gaussian ball, both centered at the origin.
pub fn sample_skewered_meatball(
    line_count: usize,
    ball_count: usize,
    seed: u64,
) -> Result<PointCloud> {
    let total = line_count + ball_count;
    if total < 2 {
        return Err(Error::Empty(total));
    }
    let d = 1.0 / 3.0f64.sqrt();
    let mut data = Array2::<f64>::zeros((total, 3));
    for i in 0..line_count {
        let t = if line_count == 1 {
            -MEATBALL_LINE_EXTENT
        } else {
            -MEATBALL_LINE_EXTENT
                + 2.0 * MEATBALL_LINE_EXTENT * i as f64 / (line_count - 1) as f64
        };
        let mut row = data.row_mut(i);
        row[0] = t * d;
        row[1] = t * d;
        row[2] = t * d;
    }
    let mut stream = Stream::new(seed);
    for i in line_count..total {
        let mut row = data.row_mut(i);
        for j in 0..3 {
            row[j] = stream.normal();
        }
    }
    PointCloud::new(data)
}

/// Cloud with i.i.d. coordinates from one of the non-Gaussian families.
/// Population covariance is proportional to the identity by construction,
/// so these clouds are isotropic no matter how skewed or heavy-tailed the
/// coordinate law is.
pub fn sample_isotropic_nongaussian(
    family: IidFamily,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    let mut stream = Stream::new(seed);
    let draw = |s: &mut Stream| match family {
        IidFamily::Uniform => s.uniform_pm1(),
        IidFamily::Poisson => s.poisson(POISSON_RATE),
        IidFamily::StudentT => s.student_t(STUDENT_T_DOF),
        IidFamily::ChiSquare => s.chi_square(CHI_SQUARE_DOF),
    };
    let mut data = Array2::<f64>::zeros((count, n));
    for mut row in data.rows_mut() {
        for j in 0..n {
            row[j] = draw(&mut stream);
        }
    }
    PointCloud::new(data)
}
