//! Per-trajectory Gaussian noise.
//!
//! Trajectory `j` of a run with master seed `s` draws from ChaCha8 keyed by
//! `s` on stream `j`; increments are consumed step-major, channel-minor, so
//! the value used at `(j, step, ℓ)` depends only on those indices and never
//! on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(master_seed: u64, trajectory: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trajectory);
        NoiseStream { rng }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `steps × channels` real Wiener increments of variance `h`, step-major.
    pub fn increments(&mut self, steps: usize, channels: usize, h: f64) -> Vec<f64> {
        let sd = h.sqrt();
        (0..steps * channels)
            .map(|_| sd * self.standard_normal())
            .collect()
    }
}

/// Sums groups of `factor` consecutive steps, giving the increments of the
/// same Brownian path on a grid `factor` times coarser.
pub fn coarsen(increments: &[f64], channels: usize, factor: usize) -> Vec<f64> {
    let fine_steps = increments.len() / channels.max(1);
    let coarse_steps = fine_steps / factor;
    let mut out = vec![0.0; coarse_steps * channels];
    for k in 0..coarse_steps {
        for j in 0..factor {
            let row = (k * factor + j) * channels;
            for l in 0..channels {
                out[k * channels + l] += increments[row + l];
            }
        }
    }
    out
}
