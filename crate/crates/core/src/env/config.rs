use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Interaction, ThermalBathParams, TwoQubitParams};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Projective σz measurements, thermalization with a tunable gap.
    ThermDominated,
    /// Weak measurement along a fixed axis; the continuous action is a y rotation angle.
    MeasDiscreteFixed,
    /// Weak measurement whose axis θ is the continuous action.
    MeasDiscreteAdaptive,
    /// Continuous (Gaussian readout) measurement with fixed-gap thermalization.
    MeasContinuous,
    /// Continuous σz measurement combined with tunable-gap thermalization.
    MeasPlusTherm,
    /// Main qubit plus an auxiliary qubit that is the only one measured.
    TwoQubit,
}

impl Regime {
    pub fn qubits(self) -> usize {
        match self {
            Regime::TwoQubit => 2,
            _ => 1,
        }
    }

    /// Encoding length 2·dim² + 1.
    pub fn state_dim(self) -> usize {
        let d = 1usize << self.qubits();
        2 * d * d + 1
    }

    /// Whether the continuous action sets the gap during thermalization.
    pub fn control_is_gap(self) -> bool {
        matches!(self, Regime::ThermDominated | Regime::MeasPlusTherm | Regime::TwoQubit)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::ThermDominated => "therm-dominated",
            Regime::MeasDiscreteFixed => "meas-discrete-fixed",
            Regime::MeasDiscreteAdaptive => "meas-discrete-adaptive",
            Regime::MeasContinuous => "meas-continuous",
            Regime::MeasPlusTherm => "meas-plus-therm",
            Regime::TwoQubit => "two-qubit",
        }
    }
}

/// Measurement axis: fixed θ, or chosen by the continuous action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Axis {
    Fixed { theta: f64 },
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    /// Discrete measurement strength κ ∈ [1/2, 1].
    #[serde(default = "one")]
    pub kappa: f64,
    /// Continuous measurement strength Δt/τ_m.
    #[serde(default = "one")]
    pub strength: f64,
    #[serde(default = "z_axis")]
    pub axis: Axis,
}

impl Default for MeasurementParams {
    fn default() -> Self {
        MeasurementParams { kappa: 1.0, strength: 1.0, axis: z_axis() }
    }
}

fn one() -> f64 {
    1.0
}

fn z_axis() -> Axis {
    Axis::Fixed { theta: 0.0 }
}

fn default_floor() -> f64 {
    0.05
}

/// Physical and reward parameters of one environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    pub regime: Regime,
    /// Trade-off weight between cooling power and measurement dissipation.
    #[serde(default = "one")]
    pub c: f64,
    pub dt: f64,
    pub bath: ThermalBathParams,
    #[serde(default)]
    pub measurement: MeasurementParams,
    #[serde(default)]
    pub two_qubit: Option<TwoQubitParams>,
    pub u_min: f64,
    pub u_max: f64,
    /// Gap controls with |u| below this are raised to ±u_floor.
    #[serde(default = "default_floor")]
    pub u_floor: f64,
    /// Control held during thermalization in the measurement-dominated regimes.
    #[serde(default = "one")]
    pub fixed_gap: f64,
    #[serde(default = "one")]
    pub power_scale: f64,
    #[serde(default = "one")]
    pub dissipation_scale: f64,
    /// Charge continuous readouts their differential entropy (can be negative).
    #[serde(default)]
    pub experimental_continuous_cost: bool,
}

impl RegimeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..=1.0).contains(&self.c) {
            return bad(format!("c must lie in [0, 1], got {}", self.c));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.power_scale > 0.0) || !(self.dissipation_scale > 0.0) {
            return bad("reward scales must be positive".into());
        }
        if !(self.u_min < self.u_max) || !self.u_min.is_finite() || !self.u_max.is_finite() {
            return bad(format!("empty control range [{}, {}]", self.u_min, self.u_max));
        }
        self.bath.validate()?;
        if self.regime.control_is_gap() && !(self.u_floor > 0.0) {
            return bad(format!("u_floor must be positive, got {}", self.u_floor));
        }
        if !self.regime.control_is_gap() && !(self.fixed_gap.abs() > 0.0) {
            return bad("fixed_gap must be nonzero".into());
        }
        let m = &self.measurement;
        if !(0.5..=1.0).contains(&m.kappa) {
            return bad(format!("kappa must lie in [1/2, 1], got {}", m.kappa));
        }
        if !(m.strength > 0.0) {
            return bad(format!("measurement strength must be positive, got {}", m.strength));
        }
        if self.regime == Regime::TwoQubit {
            match &self.two_qubit {
                Some(p) => p.validate()?,
                None => return bad("two-qubit regime needs two_qubit parameters".into()),
            }
        }
        Ok(())
    }

    /// Control used for the initial Gibbs state.
    pub fn initial_control(&self) -> f64 {
        if self.regime.control_is_gap() {
            self.u_max
        } else {
            self.fixed_gap
        }
    }

    /// Apply the zero-gap floor, keeping the sign (u = 0 maps to +u_floor).
    pub fn effective_gap(&self, u: f64) -> f64 {
        if u.abs() >= self.u_floor {
            u
        } else if u < 0.0 {
            -self.u_floor
        } else {
            self.u_floor
        }
    }

    /// Thermalization-dominated regime with the given step.
    pub fn therm_dominated(c: f64, dt: f64) -> Self {
        RegimeConfig {
            regime: Regime::ThermDominated,
            c,
            dt,
            bath: ThermalBathParams::new(1.0, 1.0, 5.0).expect("valid"),
            measurement: MeasurementParams::default(),
            two_qubit: None,
            u_min: -0.8,
            u_max: 0.8,
            u_floor: default_floor(),
            fixed_gap: 1.0,
            power_scale: 1.0,
            dissipation_scale: 1.0,
            experimental_continuous_cost: false,
        }
    }

    /// Measurement-dominated regime with discrete measurements.
    pub fn meas_discrete(kappa: f64, axis: Axis) -> Self {
        let (regime, u_min, u_max) = match axis {
            Axis::Fixed { .. } => (Regime::MeasDiscreteFixed, 0.0, 2.0 * PI),
            Axis::Adaptive => (Regime::MeasDiscreteAdaptive, -0.2, 3.4),
        };
        RegimeConfig {
            regime,
            c: 1.0,
            dt: 1.0,
            bath: ThermalBathParams::new(1.0, 0.8, 0.5).expect("valid"),
            measurement: MeasurementParams { kappa, strength: 1.0, axis },
            two_qubit: None,
            u_min,
            u_max,
            u_floor: default_floor(),
            fixed_gap: 1.0,
            power_scale: 1.0,
            dissipation_scale: 1.0,
            experimental_continuous_cost: false,
        }
    }

    /// Measurement-dominated regime with continuous readout.
    pub fn meas_continuous(strength: f64, axis: Axis) -> Self {
        let mut cfg = Self::meas_discrete(1.0, axis);
        cfg.regime = Regime::MeasContinuous;
        cfg.measurement.strength = strength;
        if axis == Axis::Adaptive {
            cfg.u_min = -0.3;
            cfg.u_max = 3.6;
        }
        cfg
    }

    /// Continuous σz measurement plus tunable-gap thermalization.
    pub fn meas_plus_therm(strength: f64) -> Self {
        let mut cfg = Self::therm_dominated(1.0, 0.05);
        cfg.regime = Regime::MeasPlusTherm;
        cfg.measurement.strength = strength;
        cfg
    }

    pub fn two_qubit(c: f64, dt: f64, variant: Interaction) -> Self {
        let mut cfg = Self::therm_dominated(c, dt);
        cfg.regime = Regime::TwoQubit;
        cfg.two_qubit = Some(TwoQubitParams { e0: 5.0, g: 1.0, variant });
        cfg
    }
}
