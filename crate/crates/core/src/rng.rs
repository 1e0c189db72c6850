//! Seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha stream keyed by a master
//! seed and selected by an index, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A generator for the `index`-th independent stream under `master`.
pub fn stream(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, for APIs that take a plain `u64` seed.
pub fn child_seed(master: u64, index: u64) -> u64 {
    use rand::RngCore;
    stream(master, index).next_u64()
}
