//! The four soft actor-critic losses with hand-derived gradients.
//!
//! All losses take the Gaussian noise ξ explicitly (one draw per state and
//! discrete branch, row-major B×3), so they are deterministic functions of their
//! inputs and can be checked against finite differences. Continuous log-densities
//! are measured on [−1, 1], independent of the physical action range.

use super::buffer::Batch;
use super::critic::{branch_inputs, CriticPair};
use super::net::FeedForwardNet;
use super::policy::{sigma_of, squashed_log_prob, PolicyParams, N_DISCRETE};
use super::schedule::TemperaturePair;
use crate::{Error, Result};

/// Policy quantities for a batch of states under fixed noise.
#[derive(Clone, Debug)]
pub struct BranchSamples {
    pub batch: usize,
    pub params: Vec<PolicyParams>,
    /// Squashed actions t = tanh(μ + σξ), B×3.
    pub t: Vec<f64>,
    /// log π_C(t | d, s) on [−1, 1], B×3.
    pub log_pi_c: Vec<f64>,
}

impl BranchSamples {
    pub fn probs(&self, b: usize) -> [f64; N_DISCRETE] {
        self.params[b].probs()
    }

    /// Mean discrete entropy −Σ_d π_d log π_d over the batch.
    pub fn discrete_entropy(&self) -> f64 {
        let total: f64 = self.params.iter().map(|p| -p.log_probs.iter().map(|&l| l.exp() * l).sum::<f64>()).sum();
        total / self.batch as f64
    }

    /// Mean π_D-weighted continuous entropy estimate −Σ_d π_d log π_C.
    pub fn continuous_entropy(&self) -> f64 {
        let mut total = 0.0;
        for (b, p) in self.params.iter().enumerate() {
            let a = p.probs();
            for d in 0..N_DISCRETE {
                total -= a[d] * self.log_pi_c[b * N_DISCRETE + d];
            }
        }
        total / self.batch as f64
    }
}

fn check_noise(batch: usize, xi: &[f64]) -> Result<()> {
    if xi.len() != batch * N_DISCRETE {
        return Err(Error::ShapeMismatch { expected: batch * N_DISCRETE, got: xi.len() });
    }
    Ok(())
}

fn branch_samples(outputs: &[f64], xi: &[f64]) -> BranchSamples {
    let batch = outputs.len() / (3 * N_DISCRETE);
    let mut params = Vec::with_capacity(batch);
    let mut t = Vec::with_capacity(batch * N_DISCRETE);
    let mut log_pi_c = Vec::with_capacity(batch * N_DISCRETE);
    for b in 0..batch {
        let p = PolicyParams::from_output(&outputs[b * 3 * N_DISCRETE..(b + 1) * 3 * N_DISCRETE]);
        for d in 0..N_DISCRETE {
            let x = xi[b * N_DISCRETE + d];
            let sigma = p.sigma(d);
            let z = p.mu[d] + sigma * x;
            t.push(z.tanh());
            log_pi_c.push(squashed_log_prob(sigma, x, z));
        }
        params.push(p);
    }
    BranchSamples { batch, params, t, log_pi_c }
}

/// Evaluate the policy net on `states` with noise `xi`.
pub fn sample_branches(policy: &FeedForwardNet, states: &[f64], xi: &[f64]) -> Result<BranchSamples> {
    let batch = states.len() / policy.input_dim();
    check_noise(batch, xi)?;
    let out = policy.forward_batch(states, batch)?;
    Ok(branch_samples(out.output(), xi))
}

/// Soft Bellman targets y = r + γ Σ_d π_d(min_j Q_targ,j − α_D log π_d − α_C log π_C).
pub fn critic_targets(
    batch: &Batch,
    critics: &CriticPair,
    policy: &FeedForwardNet,
    temps: &TemperaturePair,
    gamma: f64,
    xi_next: &[f64],
) -> Result<Vec<f64>> {
    let next = sample_branches(policy, &batch.next_states, xi_next)?;
    let x = branch_inputs(&batch.next_states, batch.state_dim, &next.t);
    let rows = batch.size * N_DISCRETE;
    let q1 = critics.target[0].forward_batch(&x, rows)?;
    let q2 = critics.target[1].forward_batch(&x, rows)?;
    let (q1, q2) = (q1.output(), q2.output());
    let (alpha_d, alpha_c) = (temps.alpha_d(), temps.alpha_c());
    let mut y = Vec::with_capacity(batch.size);
    for b in 0..batch.size {
        let p = &next.params[b];
        let a = p.probs();
        let mut v = 0.0;
        for d in 0..N_DISCRETE {
            let row = b * N_DISCRETE + d;
            let qmin = q1[row * N_DISCRETE + d].min(q2[row * N_DISCRETE + d]);
            v += a[d] * (qmin - alpha_d * p.log_probs[d] - alpha_c * next.log_pi_c[row]);
        }
        y.push(batch.rewards[b] + gamma * v);
    }
    Ok(y)
}

#[derive(Clone, Debug)]
pub struct CriticLoss {
    pub loss: [f64; 2],
    pub grads: [Vec<f64>; 2],
}

/// L_Q(φ_i) = mean_b (Q_φi(s_b, u_b)[d_b] − y_b)² for both live critics.
pub fn critic_loss(batch: &Batch, critics: &CriticPair, targets: &[f64]) -> Result<CriticLoss> {
    if targets.len() != batch.size || batch.size == 0 {
        return Err(Error::ShapeMismatch { expected: batch.size, got: targets.len() });
    }
    let x = branch_inputs_single(batch);
    let mut loss = [0.0; 2];
    let mut grads: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for i in 0..2 {
        let net = &critics.q[i];
        let cache = net.forward_batch(&x, batch.size)?;
        let q = cache.output();
        let mut d_out = vec![0.0; batch.size * N_DISCRETE];
        let inv = 1.0 / batch.size as f64;
        for b in 0..batch.size {
            let k = b * N_DISCRETE + batch.actions[b];
            let err = q[k] - targets[b];
            loss[i] += err * err * inv;
            d_out[k] = 2.0 * err * inv;
        }
        let mut g = vec![0.0; net.params().len()];
        net.backward(&cache, &d_out, Some(&mut g), false)?;
        grads[i] = g;
    }
    Ok(CriticLoss { loss, grads })
}

fn branch_inputs_single(batch: &Batch) -> Vec<f64> {
    let s = batch.state_dim;
    let mut x = Vec::with_capacity(batch.size * (s + 1));
    for b in 0..batch.size {
        x.extend_from_slice(&batch.states[b * s..(b + 1) * s]);
        x.push(batch.u_norm[b]);
    }
    x
}

#[derive(Clone, Debug)]
pub struct PolicyLoss {
    pub loss: f64,
    pub grad: Vec<f64>,
    /// Mean discrete entropy of the batch, for the temperature updates.
    pub entropy_d: f64,
    /// Mean continuous entropy estimate of the batch.
    pub entropy_c: f64,
}

/// L_π = mean_b Σ_d π_d (α_D log π_d + α_C log π_C(t_d) − min_j Q_φj(s, t_d)[d]),
/// differentiated with respect to the policy parameters only.
pub fn policy_loss(
    states: &[f64],
    critics: &CriticPair,
    policy: &FeedForwardNet,
    temps: &TemperaturePair,
    xi: &[f64],
) -> Result<PolicyLoss> {
    let state_dim = policy.input_dim();
    let batch = states.len() / state_dim;
    if batch == 0 {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    check_noise(batch, xi)?;
    let cache = policy.forward_batch(states, batch)?;
    let s = branch_samples(cache.output(), xi);
    let rows = batch * N_DISCRETE;
    let x = branch_inputs(states, state_dim, &s.t);
    let c1 = critics.q[0].forward_batch(&x, rows)?;
    let c2 = critics.q[1].forward_batch(&x, rows)?;
    let (alpha_d, alpha_c) = (temps.alpha_d(), temps.alpha_c());
    let inv = 1.0 / batch as f64;

    let mut loss = 0.0;
    let mut seed = [vec![0.0; rows * N_DISCRETE], vec![0.0; rows * N_DISCRETE]];
    let mut t_terms = vec![0.0; rows];
    for b in 0..batch {
        let p = &s.params[b];
        let a = p.probs();
        for d in 0..N_DISCRETE {
            let row = b * N_DISCRETE + d;
            let k = row * N_DISCRETE + d;
            let (qa, qb) = (c1.output()[k], c2.output()[k]);
            let j = usize::from(qb < qa);
            let t = alpha_d * p.log_probs[d] + alpha_c * s.log_pi_c[row] - qa.min(qb);
            t_terms[row] = t;
            loss += a[d] * t * inv;
            seed[j][k] = -a[d] * inv;
        }
    }

    // ∂L/∂t through the critics, only the last input column matters.
    let mut g_t = vec![0.0; rows];
    for (j, cache_j) in [&c1, &c2].into_iter().enumerate() {
        let dx = critics.q[j].backward(cache_j, &seed[j], None, true)?.expect("input adjoint");
        for (row, g) in g_t.iter_mut().enumerate() {
            *g += dx[row * (state_dim + 1) + state_dim];
        }
    }

    let mut d_out = vec![0.0; batch * 3 * N_DISCRETE];
    for b in 0..batch {
        let p = &s.params[b];
        let a = p.probs();
        let rows_b = &t_terms[b * N_DISCRETE..(b + 1) * N_DISCRETE];
        let mean_t: f64 = (0..N_DISCRETE).map(|d| a[d] * rows_b[d]).sum();
        let o = &mut d_out[b * 3 * N_DISCRETE..(b + 1) * 3 * N_DISCRETE];
        for d in 0..N_DISCRETE {
            let row = b * N_DISCRETE + d;
            // The α_D log π term contributes Σ_d π_d ∂log π_d = 0 to the logits.
            o[d] = a[d] * (rows_b[d] - mean_t) * inv;
            let t = s.t[row];
            let x = xi[row];
            let sigma = sigma_of(p.m[d]);
            let w = a[d] * inv * alpha_c;
            let dt_dz = 1.0 - t * t;
            o[N_DISCRETE + d] = g_t[row] * dt_dz + w * 2.0 * t;
            let d_sigma = g_t[row] * dt_dz * x + w * (-1.0 / sigma + 2.0 * t * x);
            o[2 * N_DISCRETE + d] = d_sigma * p.m[d] / sigma;
        }
    }
    let mut grad = vec![0.0; policy.params().len()];
    policy.backward(&cache, &d_out, Some(&mut grad), false)?;
    Ok(PolicyLoss { loss, grad, entropy_d: s.discrete_entropy(), entropy_c: s.continuous_entropy() })
}

/// Gradients of L_D = α_D(H_D − H̄_D) and L_C = α_C(H_C − H̄_C) with respect to
/// the log-temperatures.
pub fn temperature_gradients(temps: &TemperaturePair, entropy: (f64, f64), target: (f64, f64)) -> (f64, f64) {
    (temps.alpha_d() * (entropy.0 - target.0), temps.alpha_c() * (entropy.1 - target.1))
}

/// Loss values matching [`temperature_gradients`].
pub fn temperature_losses(temps: &TemperaturePair, entropy: (f64, f64), target: (f64, f64)) -> (f64, f64) {
    temperature_gradients(temps, entropy, target)
}
