//! Deterministic per-walk random streams.
//!
//! ChaCha is a counter-based generator: the key comes from the master seed and
//! the 64-bit stream id selects an independent keystream. Walk `i` of an
//! ensemble always draws from stream `i`, so results do not depend on how the
//! walks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Stream ids for auxiliary draws (start points, targets) are kept apart from
/// walk streams by a fixed tag in the high bits.
pub fn aux_stream(master_seed: u64, tag: u32) -> StreamRng {
    stream(master_seed, (1u64 << 63) | u64::from(tag))
}
