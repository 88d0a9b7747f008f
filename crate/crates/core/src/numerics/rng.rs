//! Seeded, reproducible random number generation.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), whose output is
//! fixed by its specification and therefore identical across platforms.
//! Independent workers derive their own stream from a master seed and an
//! index path, so replications never share state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::normal::phi_inv;

/// A serializable ChaCha8 generator: `(seed, stream, word position)`
/// fully determines every future draw.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

/// Persistable position of a [`SeededRng`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPosition {
    pub seed: u64,
    pub stream: u64,
    pub word_pos: u128,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for worker `path` under `master`, e.g. `[method, alpha, rep]`.
    pub fn derive(master: u64, path: &[u64]) -> Self {
        let mut h = splitmix64(master ^ 0x5851_f42d_4c95_7f2d);
        for &p in path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        Self::new(h)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn position(&self) -> RngPosition {
        RngPosition {
            seed: self.seed,
            stream: self.inner.get_stream(),
            word_pos: self.inner.get_word_pos(),
        }
    }

    pub fn from_position(pos: RngPosition) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(pos.seed);
        inner.set_stream(pos.stream);
        inner.set_word_pos(pos.word_pos);
        Self {
            seed: pos.seed,
            inner,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> u8 {
        u8::from(self.uniform() < p)
    }

    /// Standard normal draw by inversion, so the value depends only on the
    /// uniform stream and this crate's quantile function.
    pub fn standard_normal(&mut self) -> f64 {
        phi_inv(self.uniform_open())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
