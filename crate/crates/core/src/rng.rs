//! Per-replicate random streams.
//!
//! Every replicate owns a seed derived from the master seed and its index, and
//! each random ingredient draws from its own ChaCha stream, so results do not
//! depend on how replicates are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream identifiers within one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    FirstGrid = 1,
    SecondGrid = 2,
    Path = 3,
    DriftNoise = 4,
    Auxiliary = 5,
}

/// SplitMix64 finalizer of `master + (index + 1) * golden`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

/// The stream `which` of replicate `index` under `master`.
pub fn replicate_stream(master: u64, index: u64, which: Stream) -> ChaCha8Rng {
    stream(derive_seed(master, index), which)
}
