//! Counter-based Gaussian streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(domain, seed, index)`: the seed and domain form the key, the index
//! selects the stream. A sample therefore depends only on its own address,
//! never on how many draws other workers made before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates the consumers of randomness so equal seeds never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Haar = 1,
    SpdSample = 2,
    Scan = 3,
    Weyl = 4,
    Test = 5,
}

/// Deterministic stream for `(domain, seed, index)`.
pub fn stream(domain: Domain, seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Box–Muller Gaussian source over any uniform generator.
pub struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.standard();
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }
}
