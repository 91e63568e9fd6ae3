use serde::{Deserialize, Serialize};

use super::net::FeedForwardNet;
use super::policy::N_DISCRETE;
use crate::{Result, SimRng};

/// Twin Q-networks over [state, u_norm] with one output per discrete action,
/// plus their slowly tracking targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticPair {
    pub q: [FeedForwardNet; 2],
    pub target: [FeedForwardNet; 2],
}

impl CriticPair {
    pub fn new(state_dim: usize, hidden: &[usize], rng: &mut SimRng) -> Result<Self> {
        let mut sizes = vec![state_dim + 1];
        sizes.extend_from_slice(hidden);
        sizes.push(N_DISCRETE);
        let q1 = FeedForwardNet::new(&sizes, rng)?;
        let q2 = FeedForwardNet::new(&sizes, rng)?;
        Ok(CriticPair { target: [q1.clone(), q2.clone()], q: [q1, q2] })
    }

    pub fn polyak_update(&mut self, rho: f64) {
        for (t, q) in self.target.iter_mut().zip(&self.q) {
            t.polyak_from(q, rho);
        }
    }

    pub fn target_checksum(&self) -> (u64, u64) {
        (self.target[0].checksum(), self.target[1].checksum())
    }
}

/// Rows [s_b, u_{b,d}] for every (b, d), row index 3b + d.
pub fn branch_inputs(states: &[f64], state_dim: usize, u_norm: &[f64]) -> Vec<f64> {
    let batch = states.len() / state_dim;
    let mut x = Vec::with_capacity(batch * N_DISCRETE * (state_dim + 1));
    for b in 0..batch {
        let s = &states[b * state_dim..(b + 1) * state_dim];
        for d in 0..N_DISCRETE {
            x.extend_from_slice(s);
            x.push(u_norm[b * N_DISCRETE + d]);
        }
    }
    x
}
