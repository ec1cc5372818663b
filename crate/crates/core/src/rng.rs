//! Seed discipline: one 64-bit seed, independent counter-addressed substreams.
//!
//! Every unit of parallel work (a Monte Carlo trial, a synthetic row) draws
//! from `substream(seed, index)`, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SamRng = ChaCha8Rng;

/// Generator for unit of work `stream` under master `seed`.
pub fn substream(seed: u64, stream: u64) -> SamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Two-level address, e.g. (trial, region).
pub fn substream2(seed: u64, outer: u64, inner: u64) -> SamRng {
    substream(seed ^ outer.wrapping_mul(0x9E37_79B9_7F4A_7C15), inner)
}
