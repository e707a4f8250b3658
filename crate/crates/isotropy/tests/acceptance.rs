//! Acceptance suite: every release gate in one target, one test per
//! criterion, each printing a single pass/fail line (visible under
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The criteria pin the headline numbers (the uniform-ladder scores, the
//! correlated-Gaussian quadruple, the full desk-scale matrix, the
//! dimensions-utilized values), the bulk mathematical guarantees (bounds,
//! invariances, the participation-ratio identity, the sparse argmax bound),
//! the non-Gaussian calibration, and the mean sensitivity that differentiates
//! the cosine baseline. Tests are numbered so the single-threaded runner
//! executes them in order; the participation-ratio identity (criterion 5)
//! is the oracle the rest of the implementation was built against.

use std::time::Instant;

use isotropy::baselines::{self, CosSimConfig};
use isotropy::harness::{self, HarnessConfig, Scale};
use isotropy::isoscore::{isoscore, isoscore_from_covariance};
use isotropy::linalg::{self, rotate2d_embedded};
use isotropy::report::Metric;
use isotropy::rng::Stream;
use isotropy::synthgen::{
    sample_correlated_2d, sample_gaussian_diag, sample_ink, sample_isotropic_nongaussian,
    IidFamily,
};
use isotropy::PointCloud;

fn conclude(id: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {id}: {} ({detail})",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "acceptance {id} failed: {detail}");
}

#[test]
fn criterion_01_uniform_ladder() {
    let start = Instant::now();
    let mut worst_exact = 0.0f64;
    let mut worst_sampled = 0.0f64;
    for k in 1..=9usize {
        let mut spectrum = vec![0.0; 9];
        spectrum[..k].fill(1.0);
        let want = (k as f64 - 1.0) / 8.0;
        let exact = isoscore_from_covariance(&spectrum).unwrap().score;
        worst_exact = worst_exact.max((exact - want).abs());

        let cloud = sample_ink(9, k, 100_000, 100 + k as u64).unwrap();
        let sampled = isoscore(&cloud).unwrap().score;
        worst_sampled = worst_sampled.max((sampled - want).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_exact <= 1e-12 && worst_sampled <= 0.01 && elapsed < 5.0;
    conclude(
        "1",
        pass,
        &format!(
            "ladder k=1..9: exact off by {worst_exact:.1e}, sampled off by \
             {worst_sampled:.4}, {elapsed:.1}s"
        ),
    );
}

#[test]
fn criterion_02_correlated_gaussian_quadruple() {
    let start = Instant::now();
    let base = sample_correlated_2d(0.8, 100_000, 42, None).unwrap();
    let variants = [
        base.clone(),
        rotate2d_embedded(&base, 120.0, (0, 1)).unwrap(),
        rotate2d_embedded(&base, 240.0, (0, 1)).unwrap(),
        linalg::pca_reorient(&base).unwrap(),
    ];

    let iso: Vec<f64> = variants
        .iter()
        .map(|c| isoscore(c).unwrap().score)
        .collect();
    let iso_spread = iso.iter().cloned().fold(f64::MIN, f64::max)
        - iso.iter().cloned().fold(f64::MAX, f64::min);
    let iso_ok = iso.iter().all(|s| (s - 0.216).abs() <= 0.01) && iso_spread <= 0.005;

    let dirs = baselines::partition_directions(&base).unwrap();
    let part: Vec<f64> = variants
        .iter()
        .map(|c| {
            baselines::partition_score_with_directions(c, &dirs.view())
                .unwrap()
                .score
        })
        .collect();
    let part_spread = part.iter().cloned().fold(f64::MIN, f64::max)
        - part.iter().cloned().fold(f64::MAX, f64::min);
    let part_ok = (part[0] - 0.445).abs() <= 0.05 && part_spread > 0.02;

    let elapsed = start.elapsed().as_secs_f64();
    let pass = iso_ok && part_ok && elapsed < 30.0;
    conclude(
        "2",
        pass,
        &format!(
            "iso {:.4}..{:.4} (spread {iso_spread:.1e}), partition base \
             {:.4} spread {part_spread:.3}, {elapsed:.1}s",
            iso.iter().cloned().fold(f64::MAX, f64::min),
            iso.iter().cloned().fold(f64::MIN, f64::max),
            part[0]
        ),
    );
}

#[test]
fn criterion_03_desk_scale_matrix() {
    let start = Instant::now();
    let config = HarnessConfig::new(Scale::Desk, 0);
    let outcomes = harness::run_all(&config).unwrap();
    let matrix = harness::build_score_matrix(&outcomes).unwrap();

    // Expected cells, row-major over tests 1..6, columns in Metric order:
    // isoscore, avg_cos_sim, partition, id_score, varex.
    let expected: [[bool; 5]; 6] = [
        [true, false, false, true, true],
        [true, false, false, true, true],
        [true, false, true, false, false],
        [true, true, false, true, true],
        [true, false, false, false, false],
        [true, false, true, true, false],
    ];
    let mut mismatches = Vec::new();
    for (row, want) in matrix.rows.iter().zip(expected) {
        for (metric, &want_pass) in Metric::ALL.iter().zip(&want) {
            if row.cells[metric] != want_pass {
                mismatches.push(format!("test {} {}", row.test, metric.name()));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && elapsed < 600.0;
    conclude(
        "3",
        pass,
        &format!(
            "30-cell matrix, mismatches: [{}], {elapsed:.0}s",
            mismatches.join(", ")
        ),
    );
}

#[test]
fn criterion_04_dims_utilized_values() {
    let cases = [(1.0, 2.0), (3.0, 1.6), (75.0, 1.026661926768574)];
    let mut worst_exact = 0.0f64;
    let mut worst_sampled = 0.0f64;
    for (i, (x, want)) in cases.into_iter().enumerate() {
        let exact = isoscore_from_covariance(&[x, 1.0]).unwrap().dims_utilized;
        worst_exact = worst_exact.max((exact - want).abs());

        let cloud =
            sample_gaussian_diag(&[0.0, 0.0], &[x, 1.0], 100_000, 700 + i as u64).unwrap();
        let sampled = isoscore(&cloud).unwrap().dims_utilized;
        worst_sampled = worst_sampled.max((sampled - want).abs());
    }
    let pass = worst_exact <= 1e-6 && worst_sampled <= 0.02;
    conclude(
        "4",
        pass,
        &format!(
            "k(x) for x=1,3,75: exact off by {worst_exact:.1e}, sampled off by \
             {worst_sampled:.4}"
        ),
    );
}

#[test]
fn criterion_05_participation_ratio_identity() {
    let mut stream = Stream::new(505);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = 2 + stream.index(99);
        let mut spectrum: Vec<f64> = (0..n)
            .map(|_| {
                if stream.index(5) == 0 {
                    0.0
                } else {
                    stream.uniform01() * 10.0
                }
            })
            .collect();
        if spectrum.iter().all(|&v| v == 0.0) {
            spectrum[0] = 1.0;
        }
        let r = isoscore_from_covariance(&spectrum).unwrap();
        let sum: f64 = spectrum.iter().sum();
        let sum_sq: f64 = spectrum.iter().map(|v| v * v).sum();
        let participation = sum * sum / sum_sq;
        let score_closed = (participation - 1.0) / (n as f64 - 1.0);
        worst = worst
            .max((r.dims_utilized - participation).abs())
            .max((r.score - score_closed).abs());
    }
    conclude(
        "5",
        worst <= 1e-9,
        &format!("1000 spectra, worst deviation from closed form {worst:.1e}"),
    );
}

#[test]
fn criterion_06_bounds_and_invariances() {
    let mut stream = Stream::new(606);
    let mut in_bounds = true;
    let mut worst_mean = 0.0f64;
    let mut worst_scale = 0.0f64;
    let mut worst_rot = 0.0f64;
    for i in 0..1_000 {
        let n = 2 + stream.index(9);
        let count = 100 + stream.index(400);
        let mean: Vec<f64> = (0..n).map(|_| stream.uniform_pm1() * 20.0).collect();
        let cov: Vec<f64> = (0..n).map(|_| 0.05 + stream.uniform01() * 10.0).collect();
        let mut cloud = sample_gaussian_diag(&mean, &cov, count, 9_000 + i).unwrap();
        // Rotate off the axes so the cloud carries correlations.
        for _ in 0..2 {
            let (i, j) = random_plane(&mut stream, n);
            cloud = rotate2d_embedded(&cloud, stream.uniform01() * 360.0, (i, j)).unwrap();
        }

        let base = isoscore(&cloud).unwrap().score;
        in_bounds &= (0.0..=1.0).contains(&base);

        let shift: Vec<f64> = (0..n).map(|_| stream.uniform_pm1() * 50.0).collect();
        let shifted =
            PointCloud::new(cloud.data() + &ndarray::Array1::from(shift)).unwrap();
        worst_mean = worst_mean.max((isoscore(&shifted).unwrap().score - base).abs());

        let factor = 10f64.powf(stream.uniform_pm1() * 3.0);
        let scaled = PointCloud::new(cloud.data() * factor).unwrap();
        worst_scale = worst_scale.max((isoscore(&scaled).unwrap().score - base).abs());

        let (i, j) = random_plane(&mut stream, n);
        let rotated = rotate2d_embedded(&cloud, stream.uniform01() * 360.0, (i, j)).unwrap();
        worst_rot = worst_rot.max((isoscore(&rotated).unwrap().score - base).abs());
    }
    let pass =
        in_bounds && worst_mean <= 1e-9 && worst_scale <= 1e-9 && worst_rot <= 1e-6;
    conclude(
        "6",
        pass,
        &format!(
            "1000 clouds in bounds: {in_bounds}; drift mean {worst_mean:.1e}, \
             scale {worst_scale:.1e}, rotation {worst_rot:.1e}"
        ),
    );
}

fn random_plane(stream: &mut Stream, n: usize) -> (usize, usize) {
    let i = stream.index(n);
    let j = (i + 1 + stream.index(n - 1)) % n;
    (i.min(j), i.max(j))
}

#[test]
fn criterion_07_sparse_argmax_bound() {
    let mut stream = Stream::new(707);
    let mut worst_excess = f64::MIN;
    for _ in 0..1_000 {
        let n = 2 + stream.index(99);
        let k = 1 + stream.index(n);
        let spectrum: Vec<f64> = (0..n)
            .map(|i| {
                if i < k {
                    0.05 + stream.uniform01() * 10.0
                } else {
                    0.0
                }
            })
            .collect();
        let score = isoscore_from_covariance(&spectrum).unwrap().score;
        let ceiling = (k as f64 - 1.0) / (n as f64 - 1.0);
        worst_excess = worst_excess.max(score - ceiling);
    }
    conclude(
        "7",
        worst_excess <= 1e-12,
        &format!("1000 sparse spectra, worst excess over flat score {worst_excess:.1e}"),
    );
}

#[test]
fn criterion_08_nongaussian_calibration() {
    let mut min_score = f64::MAX;
    let mut seed = 800;
    for family in [
        IidFamily::Uniform,
        IidFamily::Poisson,
        IidFamily::StudentT,
        IidFamily::ChiSquare,
    ] {
        for n in [2usize, 5, 10] {
            let cloud = sample_isotropic_nongaussian(family, n, 100_000, seed).unwrap();
            min_score = min_score.min(isoscore(&cloud).unwrap().score);
            seed += 1;
        }
    }
    conclude(
        "8",
        min_score >= 0.99,
        &format!("12 non-Gaussian clouds, minimum score {min_score:.4}"),
    );
}

#[test]
fn criterion_09_cosine_mean_sensitivity() {
    let centered = sample_gaussian_diag(&[0.0; 10], &[1.0; 10], 100_000, 901).unwrap();
    let shifted = sample_gaussian_diag(&[20.0; 10], &[1.0; 10], 100_000, 902).unwrap();
    let cfg = CosSimConfig {
        pairs: 100_000,
        seed: 903,
    };
    let at_zero = baselines::avg_cos_sim(&centered, &cfg).unwrap().score;
    let at_twenty = baselines::avg_cos_sim(&shifted, &cfg).unwrap().score;
    let pass = at_zero >= 0.98 && at_twenty <= 0.05;
    conclude(
        "9",
        pass,
        &format!("centered {at_zero:.4} (needs >= 0.98), shifted {at_twenty:.4} (needs <= 0.05)"),
    );
}
