//! Deterministic random streams.
//!
//! Every random decision in the toolkit draws from a ChaCha8 generator seeded
//! with a 64-bit master seed and switched to a sub-stream chosen by hashing a
//! textual label (instance name plus purpose). Streams with different labels
//! are independent; the same `(seed, label)` pair always replays the same
//! sequence on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// 64-bit FNV-1a.
pub fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, label: &str) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label));
    rng
}
