//! Measure, flip the gap sign if excited, thermalize for τ̄ at ±ū, repeat.

use serde::{Deserialize, Serialize};

use crate::dynamics::lindblad_step;
use crate::env::{
    evaluate_policy, DiscreteAction, EnvState, HybridAction, Policy, PolicyMetrics, Regime, RegimeConfig,
};
use crate::measurement::landauer_cost;
use crate::{Error, Result, SimRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFlipThermalizePolicy {
    pub u_bar: f64,
    /// τ̄ in units of dt.
    pub tau_steps: usize,
    #[serde(skip, default = "plus")]
    sign: f64,
    #[serde(skip)]
    phase: usize,
}

fn plus() -> f64 {
    1.0
}

impl MeasureFlipThermalizePolicy {
    pub fn new(u_bar: f64, tau_steps: usize) -> Self {
        MeasureFlipThermalizePolicy { u_bar, tau_steps, sign: 1.0, phase: 0 }
    }

    pub fn tau_bar(&self, dt: f64) -> f64 {
        self.tau_steps as f64 * dt
    }
}

impl Policy for MeasureFlipThermalizePolicy {
    fn act(&mut self, state: &EnvState, _rng: &mut SimRng) -> Result<HybridAction> {
        if self.phase == 0 {
            if self.tau_steps > 0 {
                self.phase = 1;
            }
            return Ok(HybridAction::new(DiscreteAction::Measure, self.sign * self.u_bar));
        }
        if self.phase == 1 {
            // |1⟩ is the ground state for negative u.
            self.sign = if state.rho.population(1) > 0.5 { -1.0 } else { 1.0 };
        }
        self.phase = if self.phase >= self.tau_steps { 0 } else { self.phase + 1 };
        Ok(HybridAction::new(DiscreteAction::Thermalize, self.sign * self.u_bar))
    }
}

fn require_therm(config: &RegimeConfig) -> Result<()> {
    if config.regime != Regime::ThermDominated {
        return Err(Error::Config(format!("expected therm-dominated regime, got {}", config.regime.name())));
    }
    Ok(())
}

/// Monte Carlo evaluation through the environment.
pub fn run_measure_flip_thermalize(
    p: &MeasureFlipThermalizePolicy,
    config: &RegimeConfig,
    n_steps: usize,
    rng: &mut SimRng,
) -> Result<PolicyMetrics> {
    require_therm(config)?;
    let mut policy = MeasureFlipThermalizePolicy::new(p.u_bar, p.tau_steps);
    evaluate_policy(&mut policy, config, n_steps, rng)
}

/// Stationary-cycle metrics in expectation over measurement outcomes.
///
/// After measurement and feedback both branches restart from the ground state of
/// the same gap, so one deterministic cycle of τ̄ + dt gives the exact averages.
pub fn expected_measure_flip_thermalize(
    p: &MeasureFlipThermalizePolicy,
    config: &RegimeConfig,
) -> Result<PolicyMetrics> {
    require_therm(config)?;
    let u = config.effective_gap(p.u_bar.abs());
    let mut rho = crate::quantum::DensityMatrix::basis(2, 0)?;
    let mut heat = 0.0;
    for _ in 0..p.tau_steps {
        let (next, q) = lindblad_step(&rho, u, config.dt, &config.bath)?;
        heat += q;
        rho = next;
    }
    let p1 = rho.population(1).clamp(0.0, 1.0);
    let cost = landauer_cost(&[1.0 - p1, p1], config.bath.beta)?;
    let period = (p.tau_steps + 1) as f64 * config.dt;
    let avg_power = heat / period;
    let avg_dissipation = cost / period;
    let mut counts = [0u64; 3];
    counts[DiscreteAction::Thermalize.index()] = p.tau_steps as u64;
    counts[DiscreteAction::Measure.index()] = 1;
    Ok(PolicyMetrics {
        avg_power,
        avg_dissipation,
        efficiency: (avg_dissipation > 0.0).then(|| avg_power / avg_dissipation),
        steps: p.tau_steps + 1,
        action_counts: counts,
        measurement_runs: 1,
    })
}

/// Search grid over (ū, τ̄).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MftGrid {
    pub u_bars: Vec<f64>,
    /// Thermalization durations in units of dt, ascending and distinct.
    pub tau_steps: Vec<usize>,
}

impl MftGrid {
    /// ū: 17 points on [0.05, 0.8]; τ̄: 25 log-spaced points on [dt, 20/Γ], rounded
    /// to whole steps.
    pub fn default_for(config: &RegimeConfig) -> Self {
        let u_bars = linspace(0.05, 0.8, 17);
        let tau_max = 20.0 / config.bath.gamma;
        Self { u_bars, tau_steps: log_steps(config.dt, tau_max, 25, config.dt) }
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `n` log-spaced durations on [lo, hi] converted to whole steps of `dt`.
pub(crate) fn log_steps(lo: f64, hi: f64, n: usize, dt: f64) -> Vec<usize> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<usize> =
        (0..n).map(|i| ((a + (b - a) * i as f64 / (n - 1) as f64).exp() / dt).round().max(1.0) as usize).collect();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MftOptimum {
    pub policy: MeasureFlipThermalizePolicy,
    pub metrics: PolicyMetrics,
    pub figure_of_merit: f64,
}

/// Exhaustive grid search of ⟨F_c⟩ over expected-value cycles; ties go to the
/// smaller τ̄.
pub fn optimize_measure_flip_thermalize(config: &RegimeConfig, grid: &MftGrid) -> Result<MftOptimum> {
    require_therm(config)?;
    if grid.u_bars.is_empty() || grid.tau_steps.is_empty() {
        return Err(Error::InvalidParameter("empty search grid".into()));
    }
    let mut best: Option<MftOptimum> = None;
    for &k in &grid.tau_steps {
        for &u in &grid.u_bars {
            let p = MeasureFlipThermalizePolicy::new(u, k);
            let metrics = expected_measure_flip_thermalize(&p, config)?;
            let f = metrics.figure_of_merit(config.c);
            if best.as_ref().is_none_or(|b| f > b.figure_of_merit) {
                best = Some(MftOptimum { policy: p, metrics, figure_of_merit: f });
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}
