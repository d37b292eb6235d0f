//! Counter-based random streams for reproducible (parallel) Monte Carlo.
//!
//! Every simulation run owns one [`RunStream`]; there is no global RNG
//! state. A stream is a SplitMix64 generator: a 64-bit counter advanced by
//! a fixed odd increment and passed through a fixed finaliser. Replicate
//! streams are derived with [`mix_seed`], so an ensemble is reproducible
//! independently of how replicates are scheduled across threads.

/// Weyl increment of the SplitMix64 sequence (golden ratio in 64 bits).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the 64-bit finaliser.
pub const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the 64-bit finaliser.
pub const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 finaliser: a bijective avalanche on 64 bits.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

/// Derives the stream key for one replicate from the ensemble base seed.
///
/// Distinct `(seed, replicate)` pairs map to well-separated counter
/// start points, so replicates can run concurrently without sharing state.
#[inline]
pub fn mix_seed(seed: u64, replicate: u64) -> u64 {
    mix64(seed.wrapping_add(replicate.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A counter-based SplitMix64 stream.
///
/// Draws are consumed strictly in call order; simulators document the
/// order in which they draw so that independent implementations can
/// reproduce runs bit for bit.
#[derive(Debug, Clone)]
pub struct RunStream {
    state: u64,
}

impl RunStream {
    pub fn new(key: u64) -> Self {
        Self { state: key }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw on the open interval (0, 1).
    ///
    /// Uses the top 53 bits offset by half an ulp, so 0.0 and 1.0 are
    /// never returned and `-ln(u)` is always finite and positive.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Exponential draw with the given rate, by inversion.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform_open().ln() / rate
    }

    /// Poisson draw by counting unit-rate arrivals in `[0, mean]`.
    ///
    /// Exact inversion-free sampling in log space, so large means do not
    /// underflow; cost is O(mean) uniform draws.
    pub fn poisson(&mut self, mean: f64) -> u32 {
        debug_assert!(mean >= 0.0);
        let mut acc = 0.0;
        let mut count = 0u32;
        loop {
            acc += -self.uniform_open().ln();
            if acc > mean {
                return count;
            }
            count += 1;
        }
    }
}
