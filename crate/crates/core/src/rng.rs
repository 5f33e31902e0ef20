//! Reproducible random streams.
//!
//! Every sampler in this crate is a deterministic function of its
//! parameters and the generator it is handed. [`RngStream`] names one
//! ChaCha8 stream by a `(seed, stream id)` pair; distinct stream ids under
//! the same seed are independent. Parallel trial loops derive the stream
//! for trial `t` from `t` alone, which makes their results invariant under
//! worker count and merge order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A `(seed, stream id)` pair naming one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    pub const fn stream(&self) -> u64 {
        self.stream
    }

    /// Same seed, different stream id.
    pub const fn with_stream(&self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }

    /// Stream id shifted by `delta` (wrapping).
    pub const fn offset(&self, delta: u64) -> Self {
        Self { seed: self.seed, stream: self.stream.wrapping_add(delta) }
    }

    /// Instantiate the generator this pair names.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
