//! Markov decision process over the physical regimes.
//!
//! Every step lasts `dt` and applies one of three discrete actions together with
//! a continuous control whose meaning depends on the regime: a gap u, a rotation
//! angle, or a measurement angle.

mod config;
mod eval;
mod trace;

pub use config::{Axis, MeasurementParams, Regime, RegimeConfig};
pub use eval::{evaluate_policy, rollout, FnPolicy, Policy, PolicyMetrics, BURN_IN_FRACTION, MIN_EVAL_STEPS};
pub use trace::TraceRecord;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{lindblad_step, lindblad_step_main_of_two, rotate_to_negative_z, unitary_rotate, RotationAngles};
use crate::measurement::{
    apply_discrete_measurement, build_discrete_kraus, projective_measure_auxiliary, readout_differential_entropy,
    sample_continuous_measurement, ContinuousMeasurementSpec, DiscreteKrausSet, MeasurementRecord,
};
use crate::quantum::{pauli, product_state, ComplexMatrix, DensityMatrix};
use crate::{Error, Result, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteAction {
    Unitary,
    Thermalize,
    Measure,
}

impl DiscreteAction {
    pub const ALL: [DiscreteAction; 3] = [DiscreteAction::Unitary, DiscreteAction::Thermalize, DiscreteAction::Measure];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL.get(i).copied().ok_or_else(|| Error::InvalidAction(format!("discrete action index {i} out of range")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridAction {
    pub discrete: DiscreteAction,
    pub continuous: f64,
}

impl HybridAction {
    pub fn new(discrete: DiscreteAction, continuous: f64) -> Self {
        HybridAction { discrete, continuous }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub rho: DensityMatrix,
    pub last_u: f64,
    pub step_index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub next: EnvState,
    pub reward: f64,
    pub heat: f64,
    pub dissipation: f64,
    pub measured: bool,
    pub record: Option<MeasurementRecord>,
}

/// [Re ρ row-major, Im ρ row-major, last_u].
pub fn encode_state(state: &EnvState) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * state.rho.dim().pow(2) + 1);
    encode_into(state, &mut v);
    v
}

pub fn encode_into(state: &EnvState, out: &mut Vec<f64>) {
    let m = state.rho.matrix().as_slice();
    out.extend(m.iter().map(|z| z.re));
    out.extend(m.iter().map(|z| z.im));
    out.push(state.last_u);
}

/// Inverse of [`encode_state`]; the step index is not encoded.
pub fn decode_state(v: &[f64], step_index: u64) -> Result<EnvState> {
    let dim = match v.len() {
        9 => 2,
        33 => 4,
        n => return Err(Error::ShapeMismatch { expected: 9, got: n }),
    };
    let n = dim * dim;
    let entries: Vec<C64> = (0..n).map(|i| C64::new(v[i], v[n + i])).collect();
    let rho = DensityMatrix::new(ComplexMatrix::from_rows(dim, &entries)?)?;
    Ok(EnvState { rho, last_u: v[2 * n], step_index })
}

/// One environment instance. Holds derived operators so steps do not rebuild them.
#[derive(Clone, Debug)]
pub struct Environment {
    config: RegimeConfig,
    projective_z: DiscreteKrausSet,
    fixed_kraus: Option<DiscreteKrausSet>,
    propagator: Option<(f64, ComplexMatrix)>,
}

impl Environment {
    pub fn new(config: RegimeConfig) -> Result<Self> {
        config.validate()?;
        let fixed_kraus = match (config.regime, config.measurement.axis) {
            (Regime::MeasDiscreteFixed, Axis::Fixed { theta }) => {
                Some(build_discrete_kraus(config.measurement.kappa, theta)?)
            }
            (Regime::MeasDiscreteFixed, Axis::Adaptive) => {
                return Err(Error::Config("meas-discrete-fixed needs a fixed axis".into()))
            }
            _ => None,
        };
        Ok(Environment { config, projective_z: build_discrete_kraus(1.0, 0.0)?, fixed_kraus, propagator: None })
    }

    pub fn config(&self) -> &RegimeConfig {
        &self.config
    }

    /// Gibbs state at the initial control (main qubit ⊗ |0⟩ for two qubits).
    pub fn reset(&self, _rng: &mut SimRng) -> Result<EnvState> {
        let u0 = self.config.initial_control();
        let gibbs = self.config.bath.gibbs_state(u0)?;
        let rho = match self.config.regime {
            Regime::TwoQubit => product_state(&gibbs, &DensityMatrix::basis(2, 0)?)?,
            _ => gibbs,
        };
        Ok(EnvState { rho, last_u: self.config.u_max, step_index: 0 })
    }

    fn check_action(&self, action: &HybridAction) -> Result<()> {
        let u = action.continuous;
        let (lo, hi) = (self.config.u_min, self.config.u_max);
        let slack = 1e-9 * (hi - lo);
        if !u.is_finite() || u < lo - slack || u > hi + slack {
            return Err(Error::InvalidAction(format!("continuous action {u} outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn measurement_angle(&self, u: f64) -> f64 {
        match self.config.measurement.axis {
            Axis::Fixed { theta } => theta,
            Axis::Adaptive => u,
        }
    }

    fn two_qubit_propagator(&mut self, u: f64) -> Result<ComplexMatrix> {
        if let Some((cached_u, p)) = &self.propagator {
            if cached_u.to_bits() == u.to_bits() {
                return Ok(*p);
            }
        }
        let params = self.config.two_qubit.as_ref().expect("validated");
        let p = params.propagator(u, self.config.dt)?;
        self.propagator = Some((u, p));
        Ok(p)
    }

    pub fn step(&mut self, state: &EnvState, action: HybridAction, rng: &mut SimRng) -> Result<StepOutcome> {
        self.check_action(&action)?;
        let cfg = &self.config;
        let u = action.continuous;
        let rho = &state.rho;
        let mut heat = 0.0;
        let mut dissipation = 0.0;
        let mut record = None;

        let next_rho = match (cfg.regime, action.discrete) {
            (Regime::ThermDominated | Regime::MeasPlusTherm, DiscreteAction::Thermalize) => {
                let (r, q) = lindblad_step(rho, cfg.effective_gap(u), cfg.dt, &cfg.bath)?;
                heat = q;
                r
            }
            (Regime::ThermDominated, DiscreteAction::Measure) => {
                let (rec, r) = apply_discrete_measurement(rho, &self.projective_z, cfg.bath.beta, rng)?;
                dissipation = rec.landauer_cost.unwrap_or(0.0);
                record = Some(rec);
                r
            }
            (Regime::ThermDominated | Regime::MeasPlusTherm, DiscreteAction::Unitary) => *rho,

            (
                Regime::MeasDiscreteFixed | Regime::MeasDiscreteAdaptive | Regime::MeasContinuous,
                DiscreteAction::Thermalize,
            ) => {
                let (r, q) = lindblad_step(rho, cfg.fixed_gap, cfg.dt, &cfg.bath)?;
                heat = q;
                r
            }
            (Regime::MeasDiscreteFixed, DiscreteAction::Measure) => {
                let ks = self.fixed_kraus.as_ref().expect("built in new");
                let (rec, r) = apply_discrete_measurement(rho, ks, cfg.bath.beta, rng)?;
                dissipation = rec.landauer_cost.unwrap_or(0.0);
                record = Some(rec);
                r
            }
            (Regime::MeasDiscreteAdaptive, DiscreteAction::Measure) => {
                let ks = build_discrete_kraus(cfg.measurement.kappa, self.measurement_angle(u))?;
                let (rec, r) = apply_discrete_measurement(rho, &ks, cfg.bath.beta, rng)?;
                dissipation = rec.landauer_cost.unwrap_or(0.0);
                record = Some(rec);
                r
            }
            (Regime::MeasDiscreteFixed, DiscreteAction::Unitary) => unitary_rotate(rho, RotationAngles::about_y(u))?,
            (Regime::MeasDiscreteAdaptive | Regime::MeasContinuous, DiscreteAction::Unitary) => {
                rotate_to_negative_z(rho)?
            }

            (Regime::MeasContinuous | Regime::MeasPlusTherm, DiscreteAction::Measure) => {
                let theta = if cfg.regime == Regime::MeasPlusTherm { 0.0 } else { self.measurement_angle(u) };
                let spec = ContinuousMeasurementSpec::new(theta, cfg.measurement.strength)?;
                let p_plus = {
                    let proj = (pauli::identity() + pauli::theta(theta)).scale_real(0.5);
                    (proj * *rho.matrix()).trace().re.clamp(0.0, 1.0)
                };
                let (rec, r) = sample_continuous_measurement(rho, &spec, rng)?;
                if cfg.experimental_continuous_cost {
                    dissipation = readout_differential_entropy(p_plus, spec.strength, cfg.bath.beta);
                }
                record = Some(rec);
                r
            }

            (Regime::TwoQubit, DiscreteAction::Thermalize) => {
                let (r, q) = lindblad_step_main_of_two(rho, cfg.effective_gap(u), cfg.dt, &cfg.bath)?;
                heat = q;
                r
            }
            (Regime::TwoQubit, DiscreteAction::Measure) => {
                let (rec, r) = projective_measure_auxiliary(rho, cfg.bath.beta, rng)?;
                dissipation = rec.landauer_cost.unwrap_or(0.0);
                record = Some(rec);
                r
            }
            (Regime::TwoQubit, DiscreteAction::Unitary) => {
                let p = self.two_qubit_propagator(u)?;
                rho.conjugate_by(&p)?
            }
        };

        let cfg = &self.config;
        let reward = cfg.c * cfg.power_scale * heat - (1.0 - cfg.c) * cfg.dissipation_scale * dissipation;
        Ok(StepOutcome {
            next: EnvState { rho: next_rho, last_u: u, step_index: state.step_index + 1 },
            reward,
            heat,
            dissipation,
            measured: action.discrete == DiscreteAction::Measure,
            record,
        })
    }
}
