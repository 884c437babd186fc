//! Deterministic random-number streams keyed by (seed, point, trial).
//!
//! Every consumer owns its own stream, derived from the master seed and a
//! pair of coordinates, so trials can run in any order or in parallel and
//! still reproduce bit-identically.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// splitmix64 finalizer; the standard 64-bit avalanche mix.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A value-like random stream addressed by (master seed, point, trial).
///
/// Identical coordinates give identical output; distinct coordinates give
/// streams seeded through a splitmix64 expansion of the coordinate tuple.
#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha12Rng,
}

impl SeededStream {
    pub fn new(master_seed: u64, point: u64, trial: u64) -> Self {
        let mut state = master_seed
            ^ 0x243f_6a88_85a3_08d3u64
                .wrapping_add(point.wrapping_mul(0x9e37_79b9_7f4a_7c15))
                .wrapping_add(trial.wrapping_mul(0xc2b2_ae3d_27d4_eb4f));
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            rng: ChaCha12Rng::from_seed(seed),
        }
    }

    /// Uniform draw from [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from the unit-power source interval [-sqrt(3), sqrt(3)).
    pub fn source_sample(&mut self) -> f64 {
        let x = self.uniform();
        2.0 * crate::bitplane::SQRT_3 * x - crate::bitplane::SQRT_3
    }

    /// One standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `n` iid standard normal draws.
    pub fn gaussian_draws(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// A raw 64-bit word; used for interleaver construction.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Random index in `0..n` without modulo bias (Lemire-style rejection).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }
}
