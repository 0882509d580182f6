//! The single random stream that drives a simulation.
//!
//! Every stochastic choice goes through [`SimRng`], whose draws are built
//! from the raw 64-bit outputs of ChaCha8 (seeded with
//! `ChaCha8Rng::seed_from_u64`) using only the three transforms below, so
//! that an alternate implementation can reproduce a trajectory exactly:
//!
//! * `unit()`: `(x >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `open_unit()`: `1 - unit()`, uniform on `(0, 1]`.
//! * `below(n)`: Lemire's widening-multiply method with rejection,
//!   uniform on `[0, n)`.
//!
//! A Bernoulli trial `chance(p)` always consumes exactly one `unit()` and
//! succeeds iff `unit() < p`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        SimRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        1.0 - self.unit()
    }

    /// Uniform integer on `[0, n)`. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0, "below(0)");
        let n = n as u64;
        let mut m = u128::from(self.next_u64()) * u128::from(n);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = u128::from(self.next_u64()) * u128::from(n);
            }
        }
        (m >> 64) as usize
    }

    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

/// Seed for replication `index` of an ensemble rooted at `base`.
///
/// The splitmix64 finalizer applied to `base + index * 0x9E3779B97F4A7C15`
/// (wrapping). For a fixed base the map is injective in `index`.
pub fn derive_child_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
