//! Seeded random streams.
//!
//! Every concern of an experiment (action selection, the GA, replay
//! sampling and the environment) draws from its own ChaCha stream keyed by
//! the repetition seed, so two agents that differ only in mode still face
//! the same environment randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Action = 1,
    Ga = 2,
    Replay = 3,
    Env = 4,
}

pub fn stream(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// The four streams an agent/environment pair consumes.
#[derive(Debug, Clone)]
pub struct Streams {
    pub action: Rng,
    pub ga: Rng,
    pub replay: Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self {
            action: stream(seed, Stream::Action),
            ga: stream(seed, Stream::Ga),
            replay: stream(seed, Stream::Replay),
        }
    }
}
