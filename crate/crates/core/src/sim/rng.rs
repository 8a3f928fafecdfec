//! Random streams. Every random quantity of a trial comes from ChaCha8
//! keyed by `seed` (expanded with `seed_from_u64`) on stream
//! `trial * 16 + role`, so trials are independent of evaluation order.

use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) const ROLE_SOURCE: u64 = 0;
/// Test-channel outputs of encoder `m` use `ROLE_CHANNEL + m`.
pub(crate) const ROLE_CHANNEL: u64 = 1;
/// Codebook of encoder `m` uses `ROLE_CODEBOOK + m`.
pub(crate) const ROLE_CODEBOOK: u64 = 4;
/// Bin assignment of encoder `m` uses `ROLE_BINS + m`.
pub(crate) const ROLE_BINS: u64 = 7;

pub(crate) fn stream(seed: u64, trial: u64, role: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial.wrapping_mul(16).wrapping_add(role));
    r
}

/// Uniform in `[0, 1)` from the top 53 bits.
#[inline]
pub(crate) fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF sampler over `0..len`.
#[derive(Debug, Clone)]
pub(crate) struct Categorical {
    cdf: Vec<f64>,
    last: usize,
}

impl Categorical {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Categorical { cdf, last }
    }

    #[inline]
    pub(crate) fn sample(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.last)
    }

    #[inline]
    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        self.sample(unit(rng.next_u64()))
    }
}
