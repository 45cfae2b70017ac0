//! Seeded random streams.
//!
//! Every independent piece of sampling work (a level, a repetition, a
//! restart) draws from its own ChaCha stream keyed by the master seed and the
//! work item's indices, so results do not depend on how work is scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams for different purposes apart.
pub(crate) mod tag {
    pub const LEVEL: u64 = 0x4c45_5645;
    pub const ALPHA: u64 = 0x414c_5048;
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The stream for work item `path` under `seed`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut h = splitmix(seed);
    for &p in path {
        h = splitmix(h ^ splitmix(p));
    }
    let mut key = [0u8; 32];
    let mut s = h;
    for chunk in key.chunks_mut(8) {
        s = splitmix(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
