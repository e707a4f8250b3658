//! Seeded random streams shared by the generators and the sampled metrics.
//!
//! Everything that consumes randomness takes an explicit `u64` seed and runs
//! the same ChaCha stream regardless of platform, so a seed printed in a
//! report is enough to replay a run bit for bit.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 step, used to expand and mix seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a master seed and a purpose tag.
///
/// Different tags give unrelated streams, so one run-level seed can drive
/// several samplers without them sharing state.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    splitmix64(master ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// A deterministic random stream with the handful of distributions the
/// library needs.
pub struct Stream {
    rng: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        Self {
            rng: ChaCha12Rng::from_seed(key),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[-1, 1]`.
    pub fn uniform_pm1(&mut self) -> f64 {
        2.0 * self.uniform01() - 1.0
    }

    /// Unbiased index in `[0, bound)` via Lemire rejection.
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "index bound must be positive");
        let bound = bound as u64;
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (bound as u128);
            let low = m as u64;
            if low >= bound {
                return (m >> 64) as usize;
            }
            // Reject the biased low range: low < 2^64 mod bound.
            let threshold = bound.wrapping_neg() % bound;
            if low >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    /// Standard normal draw via the Box-Muller transform.
    ///
    /// Each transform yields a pair; the second value is cached so
    /// consecutive calls cost one transform per two draws.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // Map uniform01's [0, 1) onto (0, 1] so the log never sees zero.
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Poisson draw by Knuth's product-of-uniforms method.
    pub fn poisson(&mut self, lambda: f64) -> f64 {
        assert!(lambda > 0.0, "poisson rate must be positive");
        let limit = (-lambda).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= self.uniform01();
            if p <= limit {
                return k as f64;
            }
            k += 1;
        }
    }

    /// Chi-square draw with integer degrees of freedom, as a sum of squared
    /// standard normals.
    pub fn chi_square(&mut self, dof: u32) -> f64 {
        assert!(dof > 0, "chi-square needs at least one degree of freedom");
        (0..dof).map(|_| self.normal().powi(2)).sum()
    }

    /// Student-t draw with integer degrees of freedom.
    pub fn student_t(&mut self, dof: u32) -> f64 {
        self.normal() / (self.chi_square(dof) / dof as f64).sqrt()
    }
}
