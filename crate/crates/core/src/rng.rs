use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used by every seeded pipeline. ChaCha output is stable across
/// platforms and `rand` releases, which `StdRng` does not promise.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for a named stage of a seeded pipeline.
pub fn stream(seed: u64, stage: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage);
    rng
}
