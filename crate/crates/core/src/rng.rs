//! Seed plumbing. Every random consumer gets its own ChaCha stream derived
//! from a master seed, so results never depend on scheduling order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    stream_rng(seed, stream).next_u64()
}

/// Seed for a labelled purpose, e.g. `(iteration, SAMPLER)`.
pub(crate) fn derive_seed2(seed: u64, a: u64, b: u64) -> u64 {
    derive_seed(derive_seed(seed, a), b)
}
