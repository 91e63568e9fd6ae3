use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::buffer::{Batch, ReplayBuffer};
use super::critic::CriticPair;
use super::losses::{critic_loss, critic_targets, policy_loss, temperature_gradients};
use super::optim::Adam;
use super::policy::{PolicyHead, N_DISCRETE};
use super::schedule::{EntropySchedule, TemperaturePair};
use crate::env::{
    encode_into, evaluate_policy, DiscreteAction, EnvState, Environment, HybridAction, Policy, PolicyMetrics,
    RegimeConfig,
};
use crate::{rng_stream, Error, Result, SimRng};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Training hyperparameters.
/// Missing fields take their [`Default`] values, so presets list only overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub batch_size: usize,
    pub training_steps: u64,
    pub adam_lr: f64,
    pub sgd_lr: f64,
    pub buffer_size: usize,
    pub polyak: f64,
    pub hidden: Vec<usize>,
    pub initial_random_steps: u64,
    pub first_update: u64,
    pub n_updates: u64,
    pub entropy_c: EntropySchedule,
    pub entropy_d: EntropySchedule,
    pub gamma: f64,
    /// Initial log-temperatures (β_D, β_C).
    pub initial_log_alpha: (f64, f64),
    /// Multiplies every reward before it enters the buffer.
    pub reward_scale: f64,
    /// Additionally divide rewards by dt, turning per-step heat into power.
    pub scale_rewards_by_dt: bool,
    /// Steps between learning-curve rows; 0 disables them.
    pub eval_every: u64,
    pub eval_steps: usize,
}

impl Default for Hyperparameters {
    /// Desk-scale defaults for the thermalization-dominated experiment, with
    /// smaller networks, batches and budgets than a full-scale run.
    fn default() -> Self {
        Hyperparameters {
            batch_size: 64,
            training_steps: 40_000,
            adam_lr: 1e-3,
            sgd_lr: 3e-3,
            buffer_size: 40_000,
            polyak: 0.995,
            hidden: vec![64, 64],
            initial_random_steps: 5_000,
            first_update: 1_000,
            n_updates: 50,
            entropy_c: EntropySchedule { start: 0.8, end: -3.0, decay: 15_000.0 },
            entropy_d: EntropySchedule { start: 3f64.ln(), end: 0.01, decay: 7_500.0 },
            gamma: 0.998,
            initial_log_alpha: (0.0, 0.0),
            reward_scale: 1.0,
            scale_rewards_by_dt: false,
            eval_every: 0,
            eval_steps: crate::env::MIN_EVAL_STEPS,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.batch_size == 0 || self.buffer_size < self.batch_size {
            return bad("batch size must be positive and no larger than the buffer");
        }
        if !(self.adam_lr > 0.0 && self.sgd_lr > 0.0) {
            return bad("learning rates must be positive");
        }
        if !(0.0..=1.0).contains(&self.polyak) {
            return bad("polyak coefficient must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("discount factor must lie in [0, 1)");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden layer sizes must be positive");
        }
        if self.n_updates == 0 || self.first_update < self.batch_size as u64 {
            return bad("updates need n_updates > 0 and first_update ≥ batch size");
        }
        if !(self.entropy_c.decay > 0.0 && self.entropy_d.decay > 0.0) {
            return bad("entropy decay constants must be positive");
        }
        if !(self.reward_scale > 0.0) || !self.reward_scale.is_finite() {
            return bad("reward scale must be positive");
        }
        Ok(())
    }

    /// Factor applied to environment rewards.
    pub fn reward_factor(&self, dt: f64) -> f64 {
        if self.scale_rewards_by_dt {
            self.reward_scale / dt
        } else {
            self.reward_scale
        }
    }

    /// Averaging horizon −1/ln γ in steps.
    pub fn horizon(&self) -> f64 {
        -1.0 / self.gamma.ln()
    }
}

/// One row of the learning curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub step: u64,
    pub avg_power: f64,
    pub avg_dissipation: f64,
    pub efficiency: Option<f64>,
    pub critic_loss: f64,
    pub policy_loss: f64,
    pub alpha_d: f64,
    pub alpha_c: f64,
    pub entropy_d: f64,
    pub entropy_c: f64,
}

/// Losses of the latest update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub policy_loss: f64,
    pub entropy_d: f64,
    pub entropy_c: f64,
}

/// Policy, critics, optimizers, temperatures and replay buffer of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Agent {
    pub config: RegimeConfig,
    pub hyper: Hyperparameters,
    pub seed: u64,
    pub policy: PolicyHead,
    pub critics: CriticPair,
    pub temps: TemperaturePair,
    opt_q: [Adam; 2],
    opt_pi: Adam,
    buffer: ReplayBuffer,
    rng: SimRng,
    steps_done: u64,
    last_stats: UpdateStats,
}

impl Agent {
    pub fn new(config: RegimeConfig, hyper: Hyperparameters, seed: u64) -> Result<Self> {
        config.validate()?;
        hyper.validate()?;
        let mut rng = rng_stream(seed, 0);
        let state_dim = config.regime.state_dim();
        let policy = PolicyHead::new(state_dim, &hyper.hidden, config.u_min, config.u_max, &mut rng)?;
        let critics = CriticPair::new(state_dim, &hyper.hidden, &mut rng)?;
        let opt_q = [
            Adam::new(critics.q[0].params().len(), hyper.adam_lr),
            Adam::new(critics.q[1].params().len(), hyper.adam_lr),
        ];
        let opt_pi = Adam::new(policy.net.params().len(), hyper.adam_lr);
        let (beta_d, beta_c) = hyper.initial_log_alpha;
        Ok(Agent {
            buffer: ReplayBuffer::new(hyper.buffer_size, state_dim)?,
            config,
            seed,
            policy,
            critics,
            temps: TemperaturePair { beta_d, beta_c },
            opt_q,
            opt_pi,
            rng,
            steps_done: 0,
            last_stats: UpdateStats::default(),
            hyper,
        })
    }

    pub fn steps_done(&self) -> u64 {
        self.steps_done
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    /// Entropy targets (H̄_D, H̄_C) at the current step.
    pub fn entropy_targets(&self) -> (f64, f64) {
        (self.hyper.entropy_d.value(self.steps_done), self.hyper.entropy_c.value(self.steps_done))
    }

    fn noise(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// One optimization step on `batch`: critics, then policy, then
    /// temperatures, then the target networks.
    pub fn update_on(&mut self, batch: &Batch) -> Result<UpdateStats> {
        let xi_next = self.noise(batch.size * N_DISCRETE);
        let y = critic_targets(batch, &self.critics, &self.policy.net, &self.temps, self.hyper.gamma, &xi_next)?;
        let cl = critic_loss(batch, &self.critics, &y)?;
        for i in 0..2 {
            self.opt_q[i].step(self.critics.q[i].params_mut(), &cl.grads[i]);
        }
        let xi = self.noise(batch.size * N_DISCRETE);
        let pl = policy_loss(&batch.states, &self.critics, &self.policy.net, &self.temps, &xi)?;
        self.opt_pi.step(self.policy.net.params_mut(), &pl.grad);
        let target = self.entropy_targets();
        let (gd, gc) = temperature_gradients(&self.temps, (pl.entropy_d, pl.entropy_c), target);
        self.temps.beta_d -= self.hyper.sgd_lr * gd;
        self.temps.beta_c -= self.hyper.sgd_lr * gc;
        self.critics.polyak_update(self.hyper.polyak);

        let stats = UpdateStats {
            critic_loss: 0.5 * (cl.loss[0] + cl.loss[1]),
            policy_loss: pl.loss,
            entropy_d: pl.entropy_d,
            entropy_c: pl.entropy_c,
        };
        let finite =
            [stats.critic_loss, stats.policy_loss, self.temps.beta_d, self.temps.beta_c].iter().all(|v| v.is_finite())
                && self.policy.net.is_finite()
                && self.critics.q.iter().all(|q| q.is_finite());
        if !finite {
            return Err(Error::NonFinite(format!(
                "training diverged at step {}: critic loss {}, policy loss {}, β = ({}, {})",
                self.steps_done, stats.critic_loss, stats.policy_loss, self.temps.beta_d, self.temps.beta_c
            )));
        }
        self.last_stats = stats;
        Ok(stats)
    }

    /// Run the full training loop, calling `on_row` for each learning-curve row.
    pub fn train(&mut self, mut on_row: impl FnMut(&CurveRow) -> Result<()>) -> Result<Vec<CurveRow>> {
        let mut env = Environment::new(self.config.clone())?;
        let mut state = env.reset(&mut self.rng)?;
        let mut s = Vec::with_capacity(self.config.regime.state_dim());
        let mut s_next = Vec::with_capacity(s.capacity());
        let mut curve = Vec::new();
        let h = self.hyper.clone();
        let reward_factor = h.reward_factor(self.config.dt);
        while self.steps_done < h.training_steps {
            s.clear();
            encode_into(&state, &mut s);
            let (action, u_norm) = if self.steps_done < h.initial_random_steps {
                let d = self.rng.random_range(0..N_DISCRETE);
                let t: f64 = self.rng.random_range(-1.0..=1.0);
                (HybridAction::new(DiscreteAction::from_index(d)?, self.policy.to_control(t)), t)
            } else {
                let p = self.policy.sample(&s, &mut self.rng, false)?;
                (HybridAction::new(DiscreteAction::from_index(p.discrete)?, p.u), p.u_norm)
            };
            let out = env.step(&state, action, &mut self.rng)?;
            s_next.clear();
            encode_into(&out.next, &mut s_next);
            self.buffer.push(&s, action.discrete.index(), u_norm, reward_factor * out.reward, &s_next)?;
            state = out.next;
            self.steps_done += 1;

            if self.steps_done >= h.first_update && self.steps_done.is_multiple_of(h.n_updates) {
                for _ in 0..h.n_updates {
                    let batch = self.buffer.sample(h.batch_size, &mut self.rng)?;
                    self.update_on(&batch)?;
                }
            }
            if h.eval_every > 0 && self.steps_done.is_multiple_of(h.eval_every) {
                let row = self.curve_row()?;
                on_row(&row)?;
                curve.push(row);
            }
        }
        Ok(curve)
    }

    fn curve_row(&self) -> Result<CurveRow> {
        let m = self.evaluate(self.hyper.eval_steps, self.steps_done)?;
        Ok(CurveRow {
            step: self.steps_done,
            avg_power: m.avg_power,
            avg_dissipation: m.avg_dissipation,
            efficiency: m.efficiency,
            critic_loss: self.last_stats.critic_loss,
            policy_loss: self.last_stats.policy_loss,
            alpha_d: self.temps.alpha_d(),
            alpha_c: self.temps.alpha_c(),
            entropy_d: self.last_stats.entropy_d,
            entropy_c: self.last_stats.entropy_c,
        })
    }

    /// Deterministic-mode evaluation on an independent random stream.
    pub fn evaluate(&self, n_steps: usize, stream: u64) -> Result<PolicyMetrics> {
        let mut rng = rng_stream(self.seed, stream.wrapping_add(1));
        let mut policy = AgentPolicy::new(&self.policy, true);
        evaluate_policy(&mut policy, &self.config, n_steps, &mut rng)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let ck = Checkpoint { version: CHECKPOINT_VERSION, agent: self.clone() };
        crate::harness::io::write_atomic(path, serde_json::to_string(&ck)?.as_bytes())
    }

    /// Load a checkpoint; the replay buffer comes back empty with its cursor.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let raw: serde_json::Value = serde_json::from_str(&text)?;
        let found = raw.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion { found, expected: CHECKPOINT_VERSION });
        }
        let mut ck: Checkpoint = serde_json::from_value(raw)?;
        ck.agent.buffer.restore_storage();
        Ok(ck.agent)
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    agent: Agent,
}

/// Acting wrapper around a trained policy head.
pub struct AgentPolicy<'a> {
    head: &'a PolicyHead,
    deterministic: bool,
    buf: Vec<f64>,
}

impl<'a> AgentPolicy<'a> {
    pub fn new(head: &'a PolicyHead, deterministic: bool) -> Self {
        AgentPolicy { head, deterministic, buf: Vec::new() }
    }
}

impl Policy for AgentPolicy<'_> {
    fn act(&mut self, state: &EnvState, rng: &mut SimRng) -> Result<HybridAction> {
        self.buf.clear();
        encode_into(state, &mut self.buf);
        let p = self.head.sample(&self.buf, rng, self.deterministic)?;
        Ok(HybridAction::new(DiscreteAction::from_index(p.discrete)?, p.u))
    }
}
