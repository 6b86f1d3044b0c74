//! Counter-based random stream: a splitmix-style 64-bit generator with the
//! stream state derived by mixing (seed, stream_index). Distinct stream
//! indices give statistically independent sequences, so replicates can run
//! in parallel without coordination.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded, replicable uniform stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    stream_index: u64,
    state: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let state = mix(seed ^ mix(stream_index.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)));
        Self { seed, stream_index, state }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform draw on the open interval (0, 1): safe to take logs of either
    /// the value or its complement.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}
