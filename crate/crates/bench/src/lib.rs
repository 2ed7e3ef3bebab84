//! Shared fixtures for the criterion benches.

use bcmm_core::{PatternSet, SplitMix64};

pub fn random_set(seed: u64, p: usize, q: usize, density: f64) -> PatternSet {
    let mut rng = SplitMix64::new(seed);
    PatternSet::new(
        (0..q)
            .map(|_| rng.binary_vector(p, density).unwrap())
            .collect(),
    )
    .unwrap()
}
