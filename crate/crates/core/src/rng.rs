//! Deterministic random streams derived from a master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keeping the streams of one run independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Dataset,
    Contamination,
    Solver,
    Rollout,
    Noise,
    Other(u64),
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Dataset => 1,
            Stream::Contamination => 2,
            Stream::Solver => 3,
            Stream::Rollout => 4,
            Stream::Noise => 5,
            Stream::Other(k) => 0x100 + k,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for `(seed, index, purpose)`; identical inputs give identical streams.
pub fn substream(seed: u64, index: u64, purpose: Stream) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ index) ^ purpose.tag());
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(purpose.tag());
    rng
}
