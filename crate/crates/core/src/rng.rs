//! Seeded, portable random streams.
//!
//! Every stochastic piece of the crate (weight initialization, shuffling,
//! synthetic noise) draws from a ChaCha20 stream seeded via
//! `seed_from_u64`, with floats built by the fixed bit recipes below.
//! This keeps runs bit-reproducible and makes the streams easy to
//! re-implement elsewhere.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub(crate) fn stream(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)`: the top 53 bits of one `u64` draw.
pub(crate) fn unit_uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `(0, 1]`: as above, shifted one step away from zero.
/// Safe to feed to `ln`.
pub(crate) fn unit_uniform_positive(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..bound` by modulo reduction. The bias is far below
/// anything observable at the sizes used here (`bound` < 2^32).
pub(crate) fn index_below(rng: &mut ChaCha20Rng, bound: usize) -> usize {
    (rng.next_u64() % bound as u64) as usize
}
