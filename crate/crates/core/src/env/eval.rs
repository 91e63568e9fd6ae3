use serde::{Deserialize, Serialize};

use super::{DiscreteAction, EnvState, Environment, HybridAction, RegimeConfig, StepOutcome};
use crate::{Error, Result, SimRng};

pub const MIN_EVAL_STEPS: usize = 10_000;
pub const BURN_IN_FRACTION: f64 = 0.1;

/// Anything that picks an action from the current state.
pub trait Policy {
    fn act(&mut self, state: &EnvState, rng: &mut SimRng) -> Result<HybridAction>;
}

/// Adapter turning a closure into a [`Policy`].
pub struct FnPolicy<F>(pub F);

impl<F> Policy for FnPolicy<F>
where
    F: FnMut(&EnvState, &mut SimRng) -> HybridAction,
{
    fn act(&mut self, state: &EnvState, rng: &mut SimRng) -> Result<HybridAction> {
        Ok((self.0)(state, rng))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetrics {
    pub avg_power: f64,
    pub avg_dissipation: f64,
    /// ⟨P⟩/⟨D⟩; absent when nothing was dissipated.
    pub efficiency: Option<f64>,
    pub steps: usize,
    pub action_counts: [u64; 3],
    /// Number of maximal runs of consecutive measurements.
    pub measurement_runs: u64,
}

impl PolicyMetrics {
    /// ⟨F_c⟩ = c⟨P⟩ − (1−c)⟨D⟩.
    pub fn figure_of_merit(&self, c: f64) -> f64 {
        c * self.avg_power - (1.0 - c) * self.avg_dissipation
    }

    pub fn mean_measurement_run(&self) -> f64 {
        if self.measurement_runs == 0 {
            return 0.0;
        }
        self.action_counts[DiscreteAction::Measure.index()] as f64 / self.measurement_runs as f64
    }
}

/// Run `policy` for `n_steps` from a reset, calling `observe` after every step.
pub fn rollout<P: Policy + ?Sized>(
    env: &mut Environment,
    policy: &mut P,
    n_steps: usize,
    rng: &mut SimRng,
    mut observe: impl FnMut(&EnvState, &HybridAction, &StepOutcome) -> Result<()>,
) -> Result<EnvState> {
    let mut state = env.reset(rng)?;
    for _ in 0..n_steps {
        let action = policy.act(&state, rng)?;
        let out = env.step(&state, action, rng)?;
        observe(&state, &action, &out)?;
        state = out.next;
    }
    Ok(state)
}

/// Long-run averages over a rollout, discarding the first 10% as burn-in.
pub fn evaluate_policy<P: Policy + ?Sized>(
    policy: &mut P,
    config: &RegimeConfig,
    n_steps: usize,
    rng: &mut SimRng,
) -> Result<PolicyMetrics> {
    if n_steps < MIN_EVAL_STEPS {
        return Err(Error::InvalidParameter(format!(
            "evaluation needs at least {MIN_EVAL_STEPS} steps, got {n_steps}"
        )));
    }
    let mut env = Environment::new(config.clone())?;
    let burn_in = (n_steps as f64 * BURN_IN_FRACTION).round() as usize;
    let mut heat = 0.0;
    let mut diss = 0.0;
    let mut counts = [0u64; 3];
    let mut runs = 0u64;
    let mut prev_measure = false;
    let mut i = 0usize;
    rollout(&mut env, policy, n_steps, rng, |_, action, out| {
        if i >= burn_in {
            heat += out.heat;
            diss += out.dissipation;
            counts[action.discrete.index()] += 1;
            // A run straddling the burn-in boundary counts once, from the window start.
            if out.measured && (!prev_measure || i == burn_in) {
                runs += 1;
            }
        }
        prev_measure = out.measured;
        i += 1;
        Ok(())
    })?;
    let window = (n_steps - burn_in) as f64 * config.dt;
    let avg_power = heat / window;
    let avg_dissipation = diss / window;
    let efficiency = (avg_dissipation > 0.0).then(|| avg_power / avg_dissipation);
    Ok(PolicyMetrics {
        avg_power,
        avg_dissipation,
        efficiency,
        steps: n_steps - burn_in,
        action_counts: counts,
        measurement_runs: runs,
    })
}
