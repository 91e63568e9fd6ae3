//! Two-measurement strategy for adaptive weak measurements.
//!
//! Measure σx; if the state is not yet pure enough, measure again along an axis
//! close to perpendicular to the Bloch vector; rotate to −z unless the second
//! measurement already lowered ρz; thermalize; repeat.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::env::{
    evaluate_policy, DiscreteAction, EnvState, HybridAction, Policy, PolicyMetrics, Regime, RegimeConfig,
};
use crate::measurement::average_post_measurement_purity;
use crate::quantum::{bloch_vector, purity};
use crate::{Error, Result, SimRng};

/// Measurement strength whose one-shot purity from the thermal state sets the
/// default threshold.
pub const REFERENCE_KAPPA: f64 = 0.95;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
enum Stage {
    #[default]
    First,
    AfterFirst,
    AfterSecond,
    AfterRotate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptivePerpendicularPolicy {
    /// Tilt of the second axis from perpendicular, in radians; positive tilts
    /// toward σx.
    pub offset: f64,
    pub purity_threshold: f64,
    #[serde(skip)]
    stage: Stage,
    #[serde(skip)]
    rz_before: f64,
}

impl AdaptivePerpendicularPolicy {
    pub fn new(offset: f64, purity_threshold: f64) -> Result<Self> {
        if !(purity_threshold > 0.5 && purity_threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "purity threshold must lie in (1/2, 1], got {purity_threshold}"
            )));
        }
        Ok(AdaptivePerpendicularPolicy { offset, purity_threshold, stage: Stage::First, rz_before: 0.0 })
    }

    pub fn perpendicular(config: &RegimeConfig) -> Result<Self> {
        Self::new(0.0, default_purity_threshold(config)?)
    }

    /// Second-measurement angles (θ₊, θ₋) for a state with Bloch components
    /// (rx, rz); symmetric about π/2.
    pub fn second_angles(&self, rx: f64, rz: f64) -> (f64, f64) {
        // Axis n = (sin θ, cos θ) ⟂ (|rx|, rz), folded into [0, π); the mirror
        // branch rx < 0 gets π − θ₊.
        let perp = (-rz).atan2(rx.abs()).rem_euclid(PI);
        let plus = perp + self.offset;
        (plus, PI - plus)
    }
}

/// One-shot average purity of a [`REFERENCE_KAPPA`] σx measurement on the
/// thermal state.
pub fn default_purity_threshold(config: &RegimeConfig) -> Result<f64> {
    let gibbs = config.bath.gibbs_state(config.fixed_gap)?;
    average_post_measurement_purity(&gibbs, REFERENCE_KAPPA, FRAC_PI_2)
}

impl Policy for AdaptivePerpendicularPolicy {
    fn act(&mut self, state: &EnvState, _rng: &mut SimRng) -> Result<HybridAction> {
        let r = bloch_vector(&state.rho)?;
        let (kind, u, next) = match self.stage {
            Stage::First => (DiscreteAction::Measure, FRAC_PI_2, Stage::AfterFirst),
            Stage::AfterFirst if purity(&state.rho) >= self.purity_threshold => {
                (DiscreteAction::Unitary, FRAC_PI_2, Stage::AfterRotate)
            }
            Stage::AfterFirst => {
                let (tp, tm) = self.second_angles(r.rx, r.rz);
                self.rz_before = r.rz;
                // σ_{θ+π} = −σ_θ is the same measurement, so fold into the action range.
                let theta = if r.rx >= 0.0 { tp } else { tm };
                (DiscreteAction::Measure, theta.rem_euclid(PI), Stage::AfterSecond)
            }
            Stage::AfterSecond if r.rz > self.rz_before => (DiscreteAction::Unitary, FRAC_PI_2, Stage::AfterRotate),
            Stage::AfterSecond | Stage::AfterRotate => (DiscreteAction::Thermalize, FRAC_PI_2, Stage::First),
        };
        self.stage = next;
        Ok(HybridAction::new(kind, u))
    }
}

pub fn run_adaptive_perpendicular(
    p: &AdaptivePerpendicularPolicy,
    config: &RegimeConfig,
    n_steps: usize,
    rng: &mut SimRng,
) -> Result<PolicyMetrics> {
    if config.regime != Regime::MeasDiscreteAdaptive {
        return Err(Error::Config(format!("expected meas-discrete-adaptive regime, got {}", config.regime.name())));
    }
    let mut policy = AdaptivePerpendicularPolicy::new(p.offset, p.purity_threshold)?;
    evaluate_policy(&mut policy, config, n_steps, rng)
}
