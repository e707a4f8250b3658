//! Property-based checks of the mathematical invariants the estimators
//! promise: score bounds, invariance under mean shift, scaling, rotation,
//! and spectrum permutation, the participation-ratio identity, the sparse
//! argmax bound, and eigensolver self-consistency.

use isotropy::baselines;
use isotropy::isoscore::{isoscore, isoscore_from_covariance};
use isotropy::linalg::{rotate2d_embedded, sym_eigen};
use isotropy::synthgen::sample_gaussian_diag;
use isotropy::PointCloud;
use ndarray::{Array1, Array2};
use proptest::prelude::*;

const MEAN_SCALE_TOL: f64 = 1e-9;
const ROTATION_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-9;
const ARGMAX_TOL: f64 = 1e-12;

fn arb_cloud() -> impl Strategy<Value = PointCloud> {
    (
        prop::collection::vec(0.01f64..20.0, 2..8),
        50usize..400,
        any::<u64>(),
        -50.0f64..50.0,
    )
        .prop_map(|(cov, count, seed, mean)| {
            let n = cov.len();
            sample_gaussian_diag(&vec![mean; n], &cov, count, seed)
                .expect("strategy emits valid generator inputs")
        })
}

/// A spectrum with occasional exact zeros, as PCA produces for clouds that
/// do not span the ambient space.
fn arb_spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![4 => 0.01f64..10.0, 1 => Just(0.0)],
        2..100,
    )
    .prop_filter("needs some variance", |s| s.iter().sum::<f64>() > 1e-6)
}

proptest! {
    #[test]
    fn score_stays_inside_the_unit_interval(cloud in arb_cloud()) {
        let r = isoscore(&cloud).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.score));
        prop_assert!(r.dims_utilized >= 1.0);
        prop_assert!(r.dims_utilized <= cloud.dim() as f64);
        prop_assert!((0.0..=1.0).contains(&r.defect));
    }

    #[test]
    fn mean_shift_leaves_the_score_alone(
        cloud in arb_cloud(),
        shift in -100.0f64..100.0,
    ) {
        let base = isoscore(&cloud).unwrap().score;
        let offsets = Array1::from_iter(
            (0..cloud.dim()).map(|j| shift * (1.0 + j as f64)),
        );
        let shifted = PointCloud::new(cloud.data() + &offsets).unwrap();
        let moved = isoscore(&shifted).unwrap().score;
        prop_assert!((base - moved).abs() <= MEAN_SCALE_TOL,
            "shift moved score by {:e}", (base - moved).abs());
    }

    #[test]
    fn scaling_leaves_the_score_alone(
        cloud in arb_cloud(),
        log_scale in -3.0f64..3.0,
    ) {
        let base = isoscore(&cloud).unwrap().score;
        let scaled = PointCloud::new(cloud.data() * 10f64.powf(log_scale)).unwrap();
        let moved = isoscore(&scaled).unwrap().score;
        prop_assert!((base - moved).abs() <= MEAN_SCALE_TOL,
            "scaling moved score by {:e}", (base - moved).abs());
    }

    #[test]
    fn rotation_leaves_the_score_alone(
        cloud in arb_cloud(),
        angles in [0.0f64..360.0, 0.0f64..360.0, 0.0f64..360.0],
        picks in [any::<usize>(), any::<usize>(), any::<usize>()],
    ) {
        let base = isoscore(&cloud).unwrap().score;
        let n = cloud.dim();
        let mut rotated = cloud;
        // Three random plane rotations compose into a generic orthogonal map.
        for (angle, pick) in angles.into_iter().zip(picks) {
            let i = pick % n;
            let j = (i + 1 + (pick / n) % (n - 1)) % n;
            rotated = rotate2d_embedded(&rotated, angle, (i, j)).unwrap();
        }
        let moved = isoscore(&rotated).unwrap().score;
        prop_assert!((base - moved).abs() <= ROTATION_TOL,
            "rotation moved score by {:e}", (base - moved).abs());
    }

    #[test]
    fn spectrum_order_is_irrelevant(spectrum in arb_spectrum(), rot in any::<usize>()) {
        let base = isoscore_from_covariance(&spectrum).unwrap().score;
        let mut permuted = spectrum.clone();
        permuted.rotate_left(rot % spectrum.len());
        permuted.reverse();
        let moved = isoscore_from_covariance(&permuted).unwrap().score;
        prop_assert!((base - moved).abs() <= 1e-12);
    }

    #[test]
    fn dims_utilized_is_the_participation_ratio(spectrum in arb_spectrum()) {
        let n = spectrum.len() as f64;
        let r = isoscore_from_covariance(&spectrum).unwrap();
        let sum: f64 = spectrum.iter().sum();
        let sum_sq: f64 = spectrum.iter().map(|v| v * v).sum();
        let participation = sum * sum / sum_sq;
        prop_assert!((r.dims_utilized - participation).abs() <= IDENTITY_TOL,
            "pipeline k {} vs participation ratio {}", r.dims_utilized, participation);
        let from_k = (participation - 1.0) / (n - 1.0);
        prop_assert!((r.score - from_k).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn sparse_spectra_never_beat_the_flat_one(
        (n, k, values) in (2usize..50).prop_flat_map(|n| {
            (Just(n), 1..=n, prop::collection::vec(0.05f64..10.0, n))
        }),
    ) {
        let mut spectrum = values;
        for v in spectrum.iter_mut().skip(k) {
            *v = 0.0;
        }
        let score = isoscore_from_covariance(&spectrum).unwrap().score;
        let flat_k = (k as f64 - 1.0) / (n as f64 - 1.0);
        prop_assert!(score <= flat_k + ARGMAX_TOL,
            "spectrum on {k} of {n} axes scored {score}, flat gives {flat_k}");
    }

    #[test]
    fn eigen_decomposition_is_self_consistent(
        entries in prop::collection::vec(-10.0f64..10.0, 4..=64),
    ) {
        let n = (entries.len() as f64).sqrt() as usize;
        let raw = Array2::from_shape_vec((n, n), entries[..n * n].to_vec()).unwrap();
        let sym = 0.5 * (&raw + &raw.t());
        let eig = sym_eigen(&sym).unwrap();

        let vtv = eig.vectors.t().dot(&eig.vectors);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((vtv[[i, j]] - want).abs() <= 1e-9,
                    "eigenvector basis not orthonormal at ({i}, {j})");
            }
        }

        let lambda = Array2::from_diag(&Array1::from(eig.values.clone()));
        let rebuilt = eig.vectors.dot(&lambda).dot(&eig.vectors.t());
        let scale = sym.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in rebuilt.iter().zip(sym.iter()) {
            prop_assert!((a - b).abs() <= 1e-8 * scale, "reconstruction off by {:e}", (a - b).abs());
        }

        let trace: f64 = (0..n).map(|i| sym[[i, i]]).sum();
        let eig_sum: f64 = eig.values.iter().sum();
        prop_assert!((trace - eig_sum).abs() <= 1e-8 * scale.max(1.0));
    }
}

#[test]
fn partition_score_reacts_to_mean_shifts() {
    let centered = sample_gaussian_diag(&[0.0; 10], &[1.0; 10], 20_000, 11).unwrap();
    let shifted = sample_gaussian_diag(&[20.0; 10], &[1.0; 10], 20_000, 12).unwrap();
    let s0 = baselines::partition_score(&centered).unwrap().score;
    let s20 = baselines::partition_score(&shifted).unwrap().score;
    assert!(
        s0 - s20 > 0.1,
        "partition should fall sharply under mean shift: {s0} vs {s20}"
    );
    let i0 = isoscore(&centered).unwrap().score;
    let i20 = isoscore(&shifted).unwrap().score;
    assert!((i0 - i20).abs() < 0.01);
}
