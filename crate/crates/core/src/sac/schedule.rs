use serde::{Deserialize, Serialize};

/// Exponentially decaying target entropy H̄(n) = end + (start − end)·e^{−n/decay}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySchedule {
    pub start: f64,
    pub end: f64,
    pub decay: f64,
}

impl EntropySchedule {
    pub fn value(&self, step: u64) -> f64 {
        self.end + (self.start - self.end) * (-(step as f64) / self.decay).exp()
    }
}

/// Log-temperatures β with α = e^β, so α stays positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperaturePair {
    pub beta_d: f64,
    pub beta_c: f64,
}

impl TemperaturePair {
    pub fn alpha_d(&self) -> f64 {
        self.beta_d.exp()
    }

    pub fn alpha_c(&self) -> f64 {
        self.beta_c.exp()
    }
}
