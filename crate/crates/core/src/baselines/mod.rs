//! Interpretable policies used as reference points for the trained agent.

mod adaptive;
mod swap;
mod therm;

pub use adaptive::{
    default_purity_threshold, run_adaptive_perpendicular, AdaptivePerpendicularPolicy, REFERENCE_KAPPA,
};
pub use swap::{optimize_swap_policy, run_swap_policy, SwapGrid, SwapOptimum, SwapPolicy};
pub use therm::{
    expected_measure_flip_thermalize, optimize_measure_flip_thermalize, run_measure_flip_thermalize,
    MeasureFlipThermalizePolicy, MftGrid, MftOptimum,
};

use crate::env::{DiscreteAction, EnvState, HybridAction, Policy};
use crate::{Result, SimRng};

/// Always thermalize with a constant control.
#[derive(Clone, Copy, Debug)]
pub struct NeverMeasure {
    pub u: f64,
}

impl Policy for NeverMeasure {
    fn act(&mut self, _state: &EnvState, _rng: &mut SimRng) -> Result<HybridAction> {
        Ok(HybridAction::new(DiscreteAction::Thermalize, self.u))
    }
}

/// Measure on every step.
#[derive(Clone, Copy, Debug)]
pub struct AlwaysMeasure {
    pub u: f64,
}

impl Policy for AlwaysMeasure {
    fn act(&mut self, _state: &EnvState, _rng: &mut SimRng) -> Result<HybridAction> {
        Ok(HybridAction::new(DiscreteAction::Measure, self.u))
    }
}
