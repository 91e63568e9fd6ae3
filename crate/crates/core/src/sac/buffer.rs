use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SimRng};

/// Minibatch of transitions, row-major.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Batch {
    pub size: usize,
    pub state_dim: usize,
    pub states: Vec<f64>,
    pub actions: Vec<usize>,
    /// Continuous action mapped to [−1, 1].
    pub u_norm: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
}

/// Borrowed (s, d, u_norm, r, s').
pub type Transition<'a> = (&'a [f64], usize, f64, f64, &'a [f64]);

/// FIFO ring buffer of (s, d, u, r, s').
///
/// Only the cursor and length are serialized; transition storage is rebuilt empty.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplayBuffer {
    capacity: usize,
    state_dim: usize,
    len: usize,
    cursor: usize,
    #[serde(skip)]
    states: Vec<f64>,
    #[serde(skip)]
    next_states: Vec<f64>,
    #[serde(skip)]
    actions: Vec<usize>,
    #[serde(skip)]
    u_norm: Vec<f64>,
    #[serde(skip)]
    rewards: Vec<f64>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, state_dim: usize) -> Result<Self> {
        if capacity == 0 || state_dim == 0 {
            return Err(Error::InvalidParameter("replay buffer needs positive capacity and state size".into()));
        }
        Ok(ReplayBuffer {
            capacity,
            state_dim,
            len: 0,
            cursor: 0,
            states: vec![0.0; capacity * state_dim],
            next_states: vec![0.0; capacity * state_dim],
            actions: vec![0; capacity],
            u_norm: vec![0.0; capacity],
            rewards: vec![0.0; capacity],
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Reallocate storage after deserialization. Transitions are not persisted,
    /// so the buffer restarts empty at the saved cursor.
    pub fn restore_storage(&mut self) {
        if self.states.is_empty() {
            let (c, sd) = (self.capacity, self.state_dim);
            self.states = vec![0.0; c * sd];
            self.next_states = vec![0.0; c * sd];
            self.actions = vec![0; c];
            self.u_norm = vec![0.0; c];
            self.rewards = vec![0.0; c];
            self.len = 0;
        }
    }

    pub fn push(&mut self, s: &[f64], d: usize, u_norm: f64, r: f64, s_next: &[f64]) -> Result<()> {
        if s.len() != self.state_dim || s_next.len() != self.state_dim {
            return Err(Error::ShapeMismatch { expected: self.state_dim, got: s.len().max(s_next.len()) });
        }
        if self.states.is_empty() {
            return Err(Error::InvalidState("replay storage was not restored".into()));
        }
        let i = self.cursor;
        let sd = self.state_dim;
        self.states[i * sd..(i + 1) * sd].copy_from_slice(s);
        self.next_states[i * sd..(i + 1) * sd].copy_from_slice(s_next);
        self.actions[i] = d;
        self.u_norm[i] = u_norm;
        self.rewards[i] = r;
        self.cursor = (self.cursor + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
        Ok(())
    }

    /// Transition at logical position `k` (0 = oldest).
    pub fn get(&self, k: usize) -> Option<Transition<'_>> {
        if k >= self.len {
            return None;
        }
        let start = (self.cursor + self.capacity - self.len) % self.capacity;
        let i = (start + k) % self.capacity;
        let sd = self.state_dim;
        Some((
            &self.states[i * sd..(i + 1) * sd],
            self.actions[i],
            self.u_norm[i],
            self.rewards[i],
            &self.next_states[i * sd..(i + 1) * sd],
        ))
    }

    /// Uniform sample without replacement.
    pub fn sample(&self, size: usize, rng: &mut SimRng) -> Result<Batch> {
        if size == 0 || size > self.len {
            return Err(Error::InvalidParameter(format!("cannot sample {size} of {} transitions", self.len)));
        }
        let sd = self.state_dim;
        let mut b = Batch {
            size,
            state_dim: sd,
            states: Vec::with_capacity(size * sd),
            actions: Vec::with_capacity(size),
            u_norm: Vec::with_capacity(size),
            rewards: Vec::with_capacity(size),
            next_states: Vec::with_capacity(size * sd),
        };
        for i in index::sample(rng, self.len, size) {
            b.states.extend_from_slice(&self.states[i * sd..(i + 1) * sd]);
            b.next_states.extend_from_slice(&self.next_states[i * sd..(i + 1) * sd]);
            b.actions.push(self.actions[i]);
            b.u_norm.push(self.u_norm[i]);
            b.rewards.push(self.rewards[i]);
        }
        Ok(b)
    }
}
