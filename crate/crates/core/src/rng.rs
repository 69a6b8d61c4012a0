//! Seeded, platform-independent random streams.
//!
//! ChaCha is a counter-based generator, so a `(seed, stream)` pair names a
//! reproducible sequence no matter which thread consumes it.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2023;

pub type Rng = ChaCha20Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream `index` of `seed`.
pub fn derive(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A 64-bit seed for sub-stream `index`, for APIs that take plain seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    derive(seed, index).next_u64()
}
