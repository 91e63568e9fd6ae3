//! Two-qubit strategy: measure the auxiliary qubit, pick the gap sign from the
//! outcome, swap it into the main qubit, thermalize, repeat.

use serde::{Deserialize, Serialize};

use super::therm::{linspace, log_steps};
use crate::dynamics::TwoQubitParams;
use crate::env::{
    evaluate_policy, DiscreteAction, EnvState, HybridAction, Policy, PolicyMetrics, Regime, RegimeConfig,
};
use crate::{rng_stream, Error, Result, SimRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapPolicy {
    pub u_bar: f64,
    /// τ̄ in units of dt.
    pub tau_steps: usize,
    /// Unitary stroke length round(τ_swap/dt), at least one step.
    pub swap_steps: usize,
    #[serde(skip, default = "plus")]
    sign: f64,
    #[serde(skip)]
    phase: usize,
}

fn plus() -> f64 {
    1.0
}

impl SwapPolicy {
    pub fn new(u_bar: f64, tau_steps: usize, params: &TwoQubitParams, dt: f64) -> Self {
        let swap_steps = (params.tau_swap() / dt).round().max(1.0) as usize;
        SwapPolicy { u_bar, tau_steps, swap_steps, sign: 1.0, phase: 0 }
    }

    fn cycle_len(&self) -> usize {
        1 + self.swap_steps + self.tau_steps
    }
}

impl Policy for SwapPolicy {
    fn act(&mut self, state: &EnvState, _rng: &mut SimRng) -> Result<HybridAction> {
        let phase = self.phase;
        self.phase = (self.phase + 1) % self.cycle_len();
        if phase == 0 {
            return Ok(HybridAction::new(DiscreteAction::Measure, self.sign * self.u_bar));
        }
        if phase == 1 {
            // The measured auxiliary state is about to become the main qubit.
            let aux_excited = state.rho.population(1) + state.rho.population(3);
            self.sign = if aux_excited > 0.5 { -1.0 } else { 1.0 };
        }
        let kind = if phase <= self.swap_steps { DiscreteAction::Unitary } else { DiscreteAction::Thermalize };
        Ok(HybridAction::new(kind, self.sign * self.u_bar))
    }
}

fn require_two_qubit(config: &RegimeConfig) -> Result<&TwoQubitParams> {
    match (config.regime, &config.two_qubit) {
        (Regime::TwoQubit, Some(p)) => Ok(p),
        _ => Err(Error::Config(format!("expected two-qubit regime, got {}", config.regime.name()))),
    }
}

pub fn run_swap_policy(
    p: &SwapPolicy,
    config: &RegimeConfig,
    n_steps: usize,
    rng: &mut SimRng,
) -> Result<PolicyMetrics> {
    require_two_qubit(config)?;
    let mut policy = SwapPolicy { sign: 1.0, phase: 0, ..p.clone() };
    evaluate_policy(&mut policy, config, n_steps, rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapGrid {
    pub u_bars: Vec<f64>,
    pub tau_steps: Vec<usize>,
}

impl SwapGrid {
    pub fn default_for(config: &RegimeConfig) -> Self {
        let tau_max = 20.0 / config.bath.gamma;
        SwapGrid { u_bars: linspace(0.05, 0.8, 17), tau_steps: log_steps(config.dt, tau_max, 25, config.dt) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapOptimum {
    pub policy: SwapPolicy,
    pub metrics: PolicyMetrics,
    pub figure_of_merit: f64,
}

/// Grid search with common random numbers: every grid point is evaluated on the
/// same stream derived from `seed`.
pub fn optimize_swap_policy(config: &RegimeConfig, grid: &SwapGrid, n_steps: usize, seed: u64) -> Result<SwapOptimum> {
    let params = *require_two_qubit(config)?;
    if grid.u_bars.is_empty() || grid.tau_steps.is_empty() {
        return Err(Error::InvalidParameter("empty search grid".into()));
    }
    let mut best: Option<SwapOptimum> = None;
    for &k in &grid.tau_steps {
        for &u in &grid.u_bars {
            let p = SwapPolicy::new(u, k, &params, config.dt);
            let mut rng = rng_stream(seed, 0);
            let metrics = run_swap_policy(&p, config, n_steps, &mut rng)?;
            let f = metrics.figure_of_merit(config.c);
            if best.as_ref().is_none_or(|b| f > b.figure_of_merit) {
                best = Some(SwapOptimum { policy: p, metrics, figure_of_merit: f });
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}
