//! Seed derivation. Every random draw in the crate comes from a generator
//! seeded here, keyed by the global seed plus the identity of the item being
//! generated, so results do not depend on processing order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::Xxh3;

pub type Rng = ChaCha8Rng;

/// Incremental builder for a 64-bit item seed.
#[derive(Clone)]
pub struct SeedKey {
    hasher: Xxh3,
}

impl SeedKey {
    pub fn new(global_seed: u64) -> Self {
        let mut hasher = Xxh3::new();
        hasher.update(&global_seed.to_le_bytes());
        Self { hasher }
    }

    pub fn str(mut self, s: &str) -> Self {
        // length prefix keeps ("ab","c") and ("a","bc") apart
        self.hasher.update(&(s.len() as u64).to_le_bytes());
        self.hasher.update(s.as_bytes());
        self
    }

    pub fn num(mut self, n: u64) -> Self {
        self.hasher.update(&n.to_le_bytes());
        self
    }

    pub fn seed(&self) -> u64 {
        self.hasher.digest()
    }

    pub fn rng(&self) -> Rng {
        Rng::seed_from_u64(self.seed())
    }
}

pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
