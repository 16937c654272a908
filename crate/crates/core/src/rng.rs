//! Reproducible noise streams.
//!
//! Brownian increments come from a counter-based ChaCha12 generator keyed by
//! a `(seed, stream)` pair, so path-parallel simulations draw from disjoint
//! streams and the same pair always reproduces the same increments,
//! bit for bit, independent of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Seed plus stream index for path parallelism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> RngSeed {
        RngSeed { seed, stream: 0 }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream: u64) -> RngSeed {
        RngSeed { seed: self.seed, stream }
    }
}

/// Standard normal draws from the stream identified by the seed pair.
pub struct GaussianStream {
    rng: ChaCha12Rng,
}

impl GaussianStream {
    pub fn new(seed: RngSeed) -> GaussianStream {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.seed);
        rng.set_stream(seed.stream);
        GaussianStream { rng }
    }

    pub fn next_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// I.i.d. Gaussian increments with mean zero and variance `dt`.
pub fn brownian_increments(seed: RngSeed, n_steps: usize, dt: f64) -> Vec<f64> {
    assert!(n_steps >= 1, "need at least one step");
    let sqrt_dt = dt.sqrt();
    let mut stream = GaussianStream::new(seed);
    (0..n_steps).map(|_| sqrt_dt * stream.next_normal()).collect()
}
