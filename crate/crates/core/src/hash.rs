//! Stable, platform-independent hashing for seeded decisions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for every seeded decision in the pipeline.
pub type SeededRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over `seed || key`, finalized with splitmix64.
///
/// Output is fixed across platforms and releases; survivor sets and per-page
/// RNG streams depend on it.
pub fn stable_hash(seed: u64, key: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().into_iter().chain(key.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

/// RNG for one unit of work (usually a snapshot), independent of scheduling order.
pub fn derive_rng(seed: u64, key: &str) -> SeededRng {
    SeededRng::seed_from_u64(stable_hash(seed, key))
}
