//! Random-stream splitting.
//!
//! Every stream is a ChaCha8 generator. A `(seed, index)` pair maps to the
//! generator seeded with `seed` and switched to stream number `index`, so
//! sibling streams never overlap and do not depend on the order in which
//! they are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
