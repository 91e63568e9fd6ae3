use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::Interaction;
use crate::env::{Axis, Regime, RegimeConfig};
use crate::sac::Hyperparameters;
use crate::{Error, Result};

const PRESETS: &str = include_str!("../../presets.toml");

/// A named experiment: regime, per-c step sizes, c list, seeds and training
/// hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPreset {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub regime: Regime,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub strength: Option<f64>,
    #[serde(default)]
    pub axis: Option<Axis>,
    #[serde(default)]
    pub interaction: Option<Interaction>,
    pub c_values: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Step size when c has no entry in `dt_by_c`.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub dt_by_c: Vec<(f64, f64)>,
    /// Training steps for c values that need a longer budget than `hyper`.
    #[serde(default)]
    pub steps_by_c: Vec<(f64, u64)>,
    /// Desk training steps relative to the original budget, recorded in CSV headers.
    pub budget_scale: f64,
    #[serde(default)]
    pub hyper: Hyperparameters,
}

fn all_presets() -> Result<BTreeMap<String, ExperimentPreset>> {
    let mut map: BTreeMap<String, ExperimentPreset> =
        toml::from_str(PRESETS).map_err(|e| Error::Config(format!("bundled presets: {e}")))?;
    for (name, p) in map.iter_mut() {
        p.name = name.clone();
    }
    Ok(map)
}

pub fn preset_names() -> Vec<String> {
    all_presets().map(|m| m.into_keys().collect()).unwrap_or_default()
}

impl ExperimentPreset {
    pub fn load(name: &str) -> Result<Self> {
        let preset = all_presets()?.remove(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
        preset.validate()?;
        Ok(preset)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config(format!("preset {} needs c values and seeds", self.name)));
        }
        if let Some(c) = self
            .c_values
            .iter()
            .chain(self.dt_by_c.iter().map(|(c, _)| c))
            .chain(self.steps_by_c.iter().map(|(c, _)| c))
            .find(|c| !(0.0..=1.0).contains(*c))
        {
            return Err(Error::Config(format!("preset {}: c = {c} outside [0, 1]", self.name)));
        }
        if self.steps_by_c.iter().any(|&(_, n)| n == 0) {
            return Err(Error::Config(format!("preset {}: steps_by_c entries must be positive", self.name)));
        }
        if !(self.budget_scale > 0.0) {
            return Err(Error::Config(format!("preset {}: budget_scale must be positive", self.name)));
        }
        self.hyper.validate()?;
        for &c in &self.c_values {
            self.config_for(c)?.validate()?;
        }
        Ok(())
    }

    pub fn dt_for(&self, c: f64) -> Option<f64> {
        self.dt_by_c.iter().find(|(ci, _)| (ci - c).abs() < 1e-12).map(|&(_, dt)| dt).or(self.dt)
    }

    /// Training steps at trade-off weight `c`.
    pub fn steps_for(&self, c: f64) -> u64 {
        self.steps_by_c.iter().find(|(ci, _)| (ci - c).abs() < 1e-12).map_or(self.hyper.training_steps, |&(_, n)| n)
    }

    /// Environment configuration at trade-off weight `c`.
    pub fn config_for(&self, c: f64) -> Result<RegimeConfig> {
        let mut cfg = match self.regime {
            Regime::ThermDominated => RegimeConfig::therm_dominated(c, self.dt.unwrap_or(0.02)),
            Regime::MeasDiscreteFixed | Regime::MeasDiscreteAdaptive => {
                let axis = match self.regime {
                    Regime::MeasDiscreteAdaptive => Axis::Adaptive,
                    _ => self.axis.unwrap_or(Axis::Fixed { theta: 0.0 }),
                };
                RegimeConfig::meas_discrete(self.kappa.unwrap_or(1.0), axis)
            }
            Regime::MeasContinuous => RegimeConfig::meas_continuous(
                self.strength.unwrap_or(1.0),
                self.axis.unwrap_or(Axis::Fixed { theta: 0.0 }),
            ),
            Regime::MeasPlusTherm => RegimeConfig::meas_plus_therm(self.strength.unwrap_or(1.0)),
            Regime::TwoQubit => {
                RegimeConfig::two_qubit(c, self.dt.unwrap_or(0.15), self.interaction.unwrap_or_default())
            }
        };
        cfg.c = c;
        if let Some(dt) = self.dt_for(c) {
            cfg.dt = dt;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
