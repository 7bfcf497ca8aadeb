//! The one random generator family used throughout: ChaCha8, seeded from a
//! `u64`. Stream derivation uses a SplitMix64 finalizer so derived seeds do
//! not depend on platform or hashing state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `parts` under `seed`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stable 64-bit digest of a string (FNV-1a), for mixing names into seeds.
pub fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}
