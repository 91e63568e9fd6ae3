use std::f64::consts::LN_2;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::net::FeedForwardNet;
use crate::{Error, Result, SimRng};

pub const N_DISCRETE: usize = 3;
pub const SIGMA_EPS: f64 = 1e-8;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Hybrid policy: one network emitting discrete logits, Gaussian means μ_d and
/// raw scales m_d for each discrete branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyHead {
    pub net: FeedForwardNet,
    pub u_low: f64,
    pub u_high: f64,
}

/// Per-state distribution parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyParams {
    pub log_probs: [f64; N_DISCRETE],
    pub mu: [f64; N_DISCRETE],
    pub m: [f64; N_DISCRETE],
}

impl PolicyParams {
    pub fn from_output(out: &[f64]) -> Self {
        let logits = [out[0], out[1], out[2]];
        PolicyParams { log_probs: log_softmax(&logits), mu: [out[3], out[4], out[5]], m: [out[6], out[7], out[8]] }
    }

    pub fn probs(&self) -> [f64; N_DISCRETE] {
        self.log_probs.map(f64::exp)
    }

    pub fn sigma(&self, d: usize) -> f64 {
        sigma_of(self.m[d])
    }
}

pub fn sigma_of(m: f64) -> f64 {
    (m * m + SIGMA_EPS).sqrt()
}

pub fn log_softmax(logits: &[f64; N_DISCRETE]) -> [f64; N_DISCRETE] {
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logits.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    logits.map(|l| l - lse)
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// ln(1 − tanh² z), stable for large |z|.
pub fn log_one_minus_tanh_sq(z: f64) -> f64 {
    2.0 * (LN_2 - z - softplus(-2.0 * z))
}

/// Log-density of t = tanh(μ + σξ) on [−1, 1] given the noise ξ.
pub fn squashed_log_prob(sigma: f64, xi: f64, z: f64) -> f64 {
    -0.5 * xi * xi - sigma.ln() - HALF_LN_2PI - log_one_minus_tanh_sq(z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicySample {
    pub discrete: usize,
    /// Control in [u_low, u_high].
    pub u: f64,
    /// Control mapped to [−1, 1].
    pub u_norm: f64,
    pub log_pi_d: f64,
    /// Log-density of `u` on [u_low, u_high], including the tanh and affine
    /// Jacobians.
    pub log_pi_c: f64,
}

impl PolicyHead {
    pub fn new(state_dim: usize, hidden: &[usize], u_low: f64, u_high: f64, rng: &mut SimRng) -> Result<Self> {
        if !(u_low < u_high) {
            return Err(Error::InvalidParameter(format!("empty action range [{u_low}, {u_high}]")));
        }
        let mut sizes = vec![state_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(3 * N_DISCRETE);
        Ok(PolicyHead { net: FeedForwardNet::new(&sizes, rng)?, u_low, u_high })
    }

    pub fn params(&self, state: &[f64]) -> Result<PolicyParams> {
        Ok(PolicyParams::from_output(&self.net.forward(state)?))
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.u_high - self.u_low)
    }

    pub fn to_control(&self, u_norm: f64) -> f64 {
        (self.u_low + self.half_width() * (1.0 + u_norm)).clamp(self.u_low, self.u_high)
    }

    pub fn to_normalized(&self, u: f64) -> f64 {
        ((u - self.u_low) / self.half_width() - 1.0).clamp(-1.0, 1.0)
    }

    /// Draw (d, u); in deterministic mode take the most likely branch and the
    /// squashed mean.
    pub fn sample(&self, state: &[f64], rng: &mut SimRng, deterministic: bool) -> Result<PolicySample> {
        let p = self.params(state)?;
        let (d, xi) = if deterministic {
            let d = (0..N_DISCRETE).max_by(|&a, &b| p.log_probs[a].total_cmp(&p.log_probs[b])).expect("non-empty");
            (d, 0.0)
        } else {
            let w =
                WeightedIndex::new(p.probs()).map_err(|e| Error::NonFinite(format!("policy probabilities: {e}")))?;
            let d = w.sample(rng);
            (d, rng.sample::<f64, _>(StandardNormal))
        };
        let sigma = p.sigma(d);
        let z = p.mu[d] + sigma * xi;
        let t = z.tanh();
        let log_pi_c = squashed_log_prob(sigma, xi, z) - self.half_width().ln();
        Ok(PolicySample { discrete: d, u: self.to_control(t), u_norm: t, log_pi_d: p.log_probs[d], log_pi_c })
    }
}
