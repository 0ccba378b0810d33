//! Seed derivation for reproducible replications.
//!
//! One master seed drives an entire run. Child streams are derived by
//! mixing indices into the seed with a fixed 64-bit hash, so the full
//! tree of streams is determined by the master seed alone:
//!
//! - replication stream: `derive_seed(master, &[replication_index])`
//! - per-agent stream:   `derive_seed(replication_seed, &[agent_id])`
//! - sweep cell stream:  `derive_seed(master, &[cell_index, replication_index])`
//!
//! Within a round, draws are consumed in a fixed order: the policy draw
//! first, then the environment draw. All draws are `f64` in `[0, 1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere in the engines. ChaCha gives identical
/// streams on every platform for a given seed.
pub type Stream = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Bijective, well-mixed, stable across releases.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed by folding each path index into the master seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut seed = master;
    for &index in path {
        seed = mix64(seed.wrapping_add(GOLDEN_GAMMA).wrapping_add(index));
    }
    seed
}

/// Opens the deterministic stream for a derived seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}
