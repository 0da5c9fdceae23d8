//! Seeding for reproducible frame generation.
//!
//! Each frame draws from its own ChaCha8 stream, keyed by a 64-bit seed
//! derived from `(global_seed, frame_index)`. Both the derivation and the key
//! expansion are written out here so they do not depend on a library's
//! `seed_from_u64` convention.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in the config echo.
pub const RNG_ALGORITHM: &str = "chacha8-splitmix64-key;normal=rand_distr-0.5-ziggurat";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of frame `frame_index` under `global_seed`.
///
/// `mix64(global_seed ^ mix64(frame_index * GOLDEN + GOLDEN))`. Every step is a
/// bijection in each argument with the other held fixed, so two frames of one
/// run never share a seed, and neither do two runs at one frame index.
pub fn frame_seed(global_seed: u64, frame_index: u64) -> u64 {
    let idx = mix64(frame_index.wrapping_mul(GOLDEN).wrapping_add(GOLDEN));
    mix64(global_seed ^ idx)
}

/// ChaCha8 stream keyed by four SplitMix64 outputs of `seed`.
pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
