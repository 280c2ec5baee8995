use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from a single run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    seed: u64,
}

const INIT_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

/// Fixes every random stream of a run (initialization, shuffling, dropout).
pub fn set_seed(seed: u64) -> SeedStreams {
    SeedStreams { seed }
}

impl SeedStreams {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    pub fn init(&self) -> ChaCha8Rng {
        self.stream(INIT_STREAM)
    }

    pub fn shuffle(&self) -> ChaCha8Rng {
        self.stream(SHUFFLE_STREAM)
    }

    pub fn dropout(&self) -> ChaCha8Rng {
        self.stream(DROPOUT_STREAM)
    }
}
