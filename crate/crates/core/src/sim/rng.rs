//! Deterministic random streams for the simulator.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood's 64-bit mixer). It is
//! tiny, platform-independent and good enough for agent decision noise; the
//! point here is reproducibility of emitted bytes across runs, machines and
//! dependency upgrades, not statistical heroics.
//!
//! Seed derivation is layered so any single round is independently
//! reproducible:
//!
//! ```text
//! match_seed  = mix(base_seed ^ fnv1a(a_name) ^ rot(fnv1a(b_name)) ^ match_index)
//! round_seed  = mix(match_seed ^ (round_index + 1))
//! side stream = SplitMix64::new(mix(round_seed ^ (side + 1)))
//! ```

/// FNV-1a 64-bit hash, used to fold agent names into seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// SplitMix64 finalizer: a single avalanche step over a 64-bit value.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one match of a pair, derived from the base seed, both agent
/// names (order-sensitive: slot 0 vs slot 1) and the match index.
pub fn match_seed(base_seed: u64, a_name: &str, b_name: &str, match_index: u32) -> u64 {
    mix(base_seed
        ^ fnv1a(a_name.as_bytes())
        ^ fnv1a(b_name.as_bytes()).rotate_left(17)
        ^ u64::from(match_index))
}

/// Seed for one round within a match.
pub fn round_seed(match_seed: u64, round_index: u32) -> u64 {
    mix(match_seed ^ u64::from(round_index + 1))
}

/// Independent decision stream for one side within a round.
pub fn side_stream(round_seed: u64, side: usize) -> SplitMix64 {
    SplitMix64::new(mix(round_seed ^ (side as u64 + 1)))
}

/// The SplitMix64 sequence generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p` (clamped to [0, 1]).
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform in `0..n` via widening multiply. `n` must be nonzero.
    pub fn pick(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }
}
