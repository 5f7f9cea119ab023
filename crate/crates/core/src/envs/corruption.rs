use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::perf_mdp::TransitionSample;
use crate::scalar::Scalar;

use super::grid::GridWorld;

/// Reward shift `N(Z, σ)` plus distance-decaying replacement of the next state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCorruption {
    pub z: f64,
    pub sigma: f64,
    /// Decay `κ` of the replacement kernel `exp(−κ·manhattan)`.
    pub kappa: f64,
}

impl GridCorruption {
    pub fn new(z: f64, kappa: f64) -> Result<Self> {
        Self::with_sigma(z, 0.5, kappa)
    }

    pub fn with_sigma(z: f64, sigma: f64, kappa: f64) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::Config(format!("reward shift must be finite, got {z}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("reward noise deviation must be positive, got {sigma}")));
        }
        if !(kappa > 0.0) {
            return Err(Error::Config(format!("replacement decay must be positive, got {kappa}")));
        }
        Ok(Self { z, sigma, kappa })
    }

    /// Kernel weight of moving the next state by `dist` cells.
    pub fn weight(&self, dist: usize) -> f64 {
        if dist == 0 {
            1.0
        } else {
            (-self.kappa * dist as f64).exp()
        }
    }
}

/// Corrupts one sample: `r ← r + N(Z, σ)`, and `s′` is redrawn from
/// `P(s″) ∝ exp(−κ·manhattan(s″, s′))` over all cells. Drawing `s′` itself leaves it in
/// place, so a replacement happens with probability `M/(1+M)` where `M` is the kernel mass
/// off `s′`, and then lands on `s″ ≠ s′` with the normalized kernel.
pub fn corrupt_transition<T: Scalar, R: Rng + ?Sized>(
    sample: &TransitionSample<T>,
    corr: &GridCorruption,
    grid: &GridWorld<T>,
    rng: &mut R,
) -> TransitionSample<T> {
    let noise = Normal::new(corr.z, corr.sigma).expect("validated deviation");
    let r = sample.r + T::of(noise.sample(rng));
    let cells = grid.width() * grid.width();
    let total: f64 = (0..cells).map(|c| corr.weight(grid.manhattan(c, sample.s_next))).sum();
    let mut u = rng.random::<f64>() * total;
    let mut s_next = sample.s_next;
    for c in 0..cells {
        let w = corr.weight(grid.manhattan(c, sample.s_next));
        if u < w {
            s_next = c;
            break;
        }
        u -= w;
    }
    TransitionSample {
        s: sample.s,
        a: sample.a,
        s_next,
        r,
    }
}
