//! Seeded random streams.
//!
//! Every random draw goes through ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`, with a distinct stream id per purpose so that
//! e.g. changing how many candidate pairs are drawn never perturbs the
//! mixture samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    MixtureSamples = 1,
    Candidates = 2,
    SetMembership = 3,
    Partition = 4,
    Shuffle = 5,
    SyntheticColumns = 6,
    SyntheticWitness = 7,
    Perturbation = 8,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
