use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic pseudo-random source for noise sampling.
///
/// One source per in-flight request; it is deliberately not `Clone` so a
/// sequence cannot be replayed by accident.
#[derive(Debug)]
pub struct RandomSource(ChaCha8Rng);

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform sample in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
