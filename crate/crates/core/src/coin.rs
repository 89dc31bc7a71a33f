//! Counter-based random draws: the outcome for a given `(seed, stream, key)`
//! is fixed regardless of the order or number of other draws.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest key accepted by [`KeyedCoin::unit`]. ChaCha's word position is
/// 68 bits and each draw consumes two words.
pub const MAX_KEY: u64 = (1 << 62) - 1;

#[derive(Debug, Clone)]
pub struct KeyedCoin {
    rng: ChaCha8Rng,
}

impl KeyedCoin {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        KeyedCoin { rng }
    }

    /// Uniform draw in `[0, 1)` attached to `key`.
    pub fn unit(&mut self, key: u64) -> f64 {
        debug_assert!(key <= MAX_KEY);
        self.rng.set_word_pos(u128::from(key) * 2);
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`; always `true` for `p >= 1`.
    pub fn flip(&mut self, key: u64, p: f64) -> bool {
        p >= 1.0 || self.unit(key) < p
    }
}
