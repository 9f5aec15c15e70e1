//! Seeded sampling for random sets and scan grids.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Identifier embedded in reports so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "chacha20 (rand_chacha 0.9, seed_from_u64) + sparse fisher-yates";

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.random_range(lo..=hi)
    }

    /// Uniform real in `[lo, hi)`.
    pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// `count` distinct elements of `1..p`, in draw order.
    ///
    /// Partial Fisher-Yates over the virtual array [1, ..., p-1]; swapped
    /// slots live in a map so memory is O(count).
    pub fn distinct_units(&mut self, p: u64, count: usize) -> Vec<u64> {
        let len = p - 1;
        assert!(count as u64 <= len, "cannot draw {count} of {len} units");
        let mut swapped: HashMap<u64, u64> = HashMap::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        for i in 0..count as u64 {
            let j = self.range(i, len - 1);
            let vj = *swapped.get(&j).unwrap_or(&j);
            let vi = *swapped.get(&i).unwrap_or(&i);
            swapped.insert(j, vi);
            out.push(vj + 1);
        }
        out
    }
}
