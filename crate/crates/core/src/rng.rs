//! SplitMix64, the generator behind every seeded experiment.
//!
//! The whole generator is its update equations, so any implementation in
//! any language reproduces the same stream from the same seed:
//!
//! ```text
//! state  <- state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z      <- state
//! z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2^64)
//! z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB (mod 2^64)
//! output <- z XOR (z >> 31)
//! ```
//!
//! A Bernoulli(`d`) bit is `(output >> 11) * 2^-53 < d`. Trial `t` of a run
//! seeded with `s` uses a fresh generator seeded with [`trial_seed`]`(s, t)`.

use crate::bitvec::BinaryVector;
use crate::error::Result;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, density: f64) -> bool {
        self.next_f64() < density
    }

    /// `p` Bernoulli draws, bit 0 first.
    pub fn binary_vector(&mut self, p: usize, density: f64) -> Result<BinaryVector> {
        BinaryVector::from_fn(p, |_| self.bernoulli(density))
    }
}

/// Seed of trial `t`: the first output of a generator seeded with
/// `seed + t * 0x9E3779B97F4A7C15`. Independent of execution order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    SplitMix64::new(seed.wrapping_add(trial.wrapping_mul(GOLDEN_GAMMA))).next_u64()
}
