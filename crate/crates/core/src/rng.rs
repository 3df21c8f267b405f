//! Seeded, splittable sampling streams.
//!
//! Every sample is drawn from a ChaCha stream keyed by `(seed, index)`, so a
//! sample depends only on those two numbers and not on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
