use serde::{Deserialize, Serialize};

use super::{encode_state, DiscreteAction, EnvState, HybridAction, StepOutcome};
use crate::measurement::Outcome;
use crate::quantum::{bloch_vector, concurrence, partial_trace, BlochVector, Subsystem};
use crate::Result;

/// One line of a trajectory log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub discrete_action: DiscreteAction,
    pub u: f64,
    /// Encoding of the state after the step, without the trailing control.
    pub rho_flat: Vec<f64>,
    pub heat: f64,
    pub dissipation: f64,
    pub reward: f64,
    pub outcome: Option<Outcome>,
    /// Bloch vector of the (main) qubit after the step.
    pub bloch: BlochVector,
    /// Two-qubit runs only.
    pub concurrence: Option<f64>,
}

impl TraceRecord {
    pub fn new(prev: &EnvState, action: &HybridAction, out: &StepOutcome) -> Result<Self> {
        let next = &out.next;
        let mut rho_flat = encode_state(next);
        rho_flat.pop();
        let (bloch, conc) = if next.rho.dim() == 4 {
            let main = partial_trace(&next.rho, Subsystem::Main)?;
            (bloch_vector(&main)?, Some(concurrence(&next.rho)?))
        } else {
            (bloch_vector(&next.rho)?, None)
        };
        Ok(TraceRecord {
            step: prev.step_index,
            discrete_action: action.discrete,
            u: action.continuous,
            rho_flat,
            heat: out.heat,
            dissipation: out.dissipation,
            reward: out.reward,
            outcome: out.record.map(|r| r.outcome),
            bloch,
            concurrence: conc,
        })
    }
}
