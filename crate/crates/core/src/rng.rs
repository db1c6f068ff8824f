//! Seeded randomness. Every random choice in the crate comes from a ChaCha20
//! stream keyed by a 64-bit seed, so runs are reproducible on any platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream ids keep unrelated consumers of one seed independent.
pub const STREAM_LINEAR_MAP: u64 = 0;
pub const STREAM_SUITE: u64 = 1;

/// ChaCha20 keyed by the little-endian seed, positioned on `stream`.
pub fn keyed(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Uniform in `0..bound` by rejection on full 64-bit draws.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// Uniform in `lo..=hi`.
pub fn between(rng: &mut impl RngCore, lo: u64, hi: u64) -> u64 {
    lo + below(rng, hi - lo + 1)
}
