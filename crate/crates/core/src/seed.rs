//! Counter-based seed derivation.
//!
//! Every task (a row of an experiment, a restart of an optimizer) owns its own
//! random stream derived from `(root, tag, index)`. Streams never depend on
//! execution order, so parallel and sequential runs draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The seeded random stream used throughout the crate.
pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a root seed, a domain tag and a counter into one 64-bit seed.
pub fn mix(root: u64, tag: u64, index: u64) -> u64 {
    let a = splitmix64(root);
    let b = splitmix64(a ^ tag.wrapping_mul(GOLDEN));
    splitmix64(b ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// FNV-1a over a short ASCII tag, for turning experiment names into tags.
pub fn tag(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

pub fn derived_stream(root: u64, tag: u64, index: u64) -> Stream {
    stream(mix(root, tag, index))
}
