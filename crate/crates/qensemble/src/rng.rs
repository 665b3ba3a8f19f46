//! Counter-based random numbers.
//!
//! Every draw is a pure function of (seed, counter), so sampling can be
//! split across threads or replayed in any order without changing results.

/// SplitMix64 finalizer over a seed/counter pair.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Uniform sample in [0, 1) for draw number `index`.
    pub fn uniform(&self, index: u64) -> f64 {
        let z = mix(self
            .seed
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        // 53 high bits -> double in [0, 1)
        (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn mix(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
