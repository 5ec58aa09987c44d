//! Reproducible randomness for parallel ensembles.
//!
//! Every path gets its own ChaCha12 stream, addressed by (master seed,
//! path index). Streams are statistically independent and the draw sequence
//! within a stream is fixed, so an ensemble's output is a pure function of
//! the master seed no matter how paths are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::math;

/// A seeded, stream-addressed uniform/Gaussian source.
#[derive(Debug, Clone)]
pub struct SplitRng {
    chacha: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl SplitRng {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut chacha = ChaCha12Rng::seed_from_u64(master_seed);
        chacha.set_stream(stream);
        Self {
            chacha,
            spare_normal: None,
        }
    }

    /// Uniform on (0, 1]: 53 random bits, never exactly zero.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (((self.chacha.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via the Marsaglia polar method, one spare cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                let m = math::sqrt(-2.0 * math::ln(s) / s);
                self.spare_normal = Some(v * m);
                return u * m;
            }
        }
    }
}
