//! Measurement channels, outcome sampling and Landauer cost accounting.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::quantum::{bloch_vector, pauli, ComplexMatrix, DensityMatrix};
use crate::{Error, Result, SimRng};

/// Branch probabilities are clamped here before sampling.
pub const PROB_FLOOR: f64 = 1e-15;

/// Two-outcome weak measurement of σ_θ with strength κ.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteKrausSet {
    pub kappa: f64,
    pub theta: f64,
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
}

/// M± = ½(√κ + √(1−κ))I ± ½(√κ − √(1−κ))σ_θ.
pub fn build_discrete_kraus(kappa: f64, theta: f64) -> Result<DiscreteKrausSet> {
    if !(0.5..=1.0).contains(&kappa) {
        return Err(Error::InvalidParameter(format!("kappa must lie in [1/2, 1], got {kappa}")));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite, got {theta}")));
    }
    let a = 0.5 * (kappa.sqrt() + (1.0 - kappa).sqrt());
    let b = 0.5 * (kappa.sqrt() - (1.0 - kappa).sqrt());
    let id = pauli::identity().scale_real(a);
    let s = pauli::theta(theta).scale_real(b);
    Ok(DiscreteKrausSet { kappa, theta, plus: id + s, minus: id - s })
}

impl DiscreteKrausSet {
    pub fn operators(&self) -> [ComplexMatrix; 2] {
        [self.plus, self.minus]
    }

    /// ‖Σ M†M − I‖_max.
    pub fn completeness_error(&self) -> f64 {
        let sum = self.plus.dagger() * self.plus + self.minus.dagger() * self.minus;
        sum.max_abs_diff(&pauli::identity())
    }
}

/// Continuous readout of σ_θ over a step of length Δt with timescale τ_m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousMeasurementSpec {
    pub theta: f64,
    /// Δt/τ_m.
    pub strength: f64,
}

impl ContinuousMeasurementSpec {
    pub fn new(theta: f64, strength: f64) -> Result<Self> {
        if !(strength > 0.0) || !strength.is_finite() {
            return Err(Error::InvalidParameter(format!("strength must be positive, got {strength}")));
        }
        Ok(ContinuousMeasurementSpec { theta, strength })
    }

    /// Readout variance τ_m/Δt.
    pub fn variance(&self) -> f64 {
        1.0 / self.strength
    }

    /// M_k = (s/2π)^{1/4} exp(−s(k − σ_θ)²/4), written in the σ_θ eigenbasis.
    pub fn kraus(&self, k: f64) -> ComplexMatrix {
        let s = self.strength;
        let pref = (s / (2.0 * std::f64::consts::PI)).powf(0.25);
        let wp = pref * (-s * (k - 1.0).powi(2) / 4.0).exp();
        let wm = pref * (-s * (k + 1.0).powi(2) / 4.0).exp();
        projector_sum(self.theta, wp, wm)
    }
}

/// w₊Π₊ + w₋Π₋ with Π± = (I ± σ_θ)/2.
fn projector_sum(theta: f64, wp: f64, wm: f64) -> ComplexMatrix {
    pauli::identity().scale_real(0.5 * (wp + wm)) + pauli::theta(theta).scale_real(0.5 * (wp - wm))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Index of a discrete outcome: 0 for "+" (or auxiliary |0⟩), 1 for "−" (or |1⟩).
    Discrete(u8),
    /// Continuous readout k.
    Readout(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    /// Outcome probability, or readout density for continuous measurements.
    pub probability: f64,
    /// Erasure work; `None` where the Shannon cost is not defined.
    pub landauer_cost: Option<f64>,
}

/// Shannon entropy in nats; rejects negative entries and unnormalized input.
pub fn shannon_entropy(probabilities: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut h = 0.0;
    for &p in probabilities {
        if p < 0.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid probability {p}")));
        }
        total += p;
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
    }
    Ok(h)
}

/// S[{p_k}]/β.
pub fn landauer_cost(probabilities: &[f64], beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(shannon_entropy(probabilities)? / beta)
}

fn two_outcome(
    rho: &DensityMatrix,
    ops: [ComplexMatrix; 2],
    beta: f64,
    rng: &mut SimRng,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    let m = rho.matrix();
    let raw: Vec<f64> = ops.iter().map(|k| (*k * *m * k.dagger()).trace().re.max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    let probs = [raw[0] / total, raw[1] / total];
    let cost = landauer_cost(&probs, beta)?;
    let p0 = probs[0].clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    let mut k = if rng.random::<f64>() < p0 { 0 } else { 1 };
    if raw[k] == 0.0 {
        k = 1 - k;
    }
    let post = DensityMatrix::normalized(ops[k] * *m * ops[k].dagger())?;
    let record = MeasurementRecord {
        outcome: Outcome::Discrete(k as u8),
        probability: probs[k].max(PROB_FLOOR),
        landauer_cost: Some(cost),
    };
    Ok((record, post))
}

pub fn apply_discrete_measurement(
    rho: &DensityMatrix,
    ks: &DiscreteKrausSet,
    beta: f64,
    rng: &mut SimRng,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("expected a single qubit, got dim {}", rho.dim())));
    }
    two_outcome(rho, ks.operators(), beta, rng)
}

/// Projective z measurement of the auxiliary qubit of a two-qubit state.
pub fn projective_measure_auxiliary(
    rho: &DensityMatrix,
    beta: f64,
    rng: &mut SimRng,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDimension(format!("expected two qubits, got dim {}", rho.dim())));
    }
    let i2 = pauli::identity();
    let p0 = ComplexMatrix::from_diagonal(&[1.0, 0.0])?;
    let p1 = ComplexMatrix::from_diagonal(&[0.0, 1.0])?;
    two_outcome(rho, [i2.kron(&p0)?, i2.kron(&p1)?], beta, rng)
}

/// Sample a readout from the two-Gaussian mixture and apply M_k.
///
/// The record carries no Landauer cost: the Shannon cost of a continuous readout
/// is not defined.
pub fn sample_continuous_measurement(
    rho: &DensityMatrix,
    spec: &ContinuousMeasurementSpec,
    rng: &mut SimRng,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("expected a single qubit, got dim {}", rho.dim())));
    }
    let s = spec.strength;
    let m = rho.matrix();
    let proj = (pauli::identity() + pauli::theta(spec.theta)).scale_real(0.5);
    let p_plus = (proj * *m).trace().re.clamp(0.0, 1.0);
    let (k, unnormalized) = loop {
        let mean = if rng.random::<f64>() < p_plus.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR) { 1.0 } else { -1.0 };
        let xi: f64 = rng.sample(StandardNormal);
        let k = mean + xi / s.sqrt();
        // Relative branch weights in log space keep the update finite for large s.
        let lp = -s * (k - 1.0).powi(2) / 4.0;
        let lm = -s * (k + 1.0).powi(2) / 4.0;
        let top = lp.max(lm);
        let op = projector_sum(spec.theta, (lp - top).exp(), (lm - top).exp());
        let out = op * *m * op;
        // A clamped near-impossible branch can underflow to the zero matrix.
        if out.trace().re > 0.0 {
            break (k, out);
        }
    };
    let post = DensityMatrix::normalized(unnormalized)?;

    let density = readout_density(p_plus, s, k);
    let record = MeasurementRecord { outcome: Outcome::Readout(k), probability: density, landauer_cost: None };
    Ok((record, post))
}

/// p₊N(k; +1, 1/s) + p₋N(k; −1, 1/s).
pub fn readout_density(p_plus: f64, strength: f64, k: f64) -> f64 {
    let norm = (strength / (2.0 * std::f64::consts::PI)).sqrt();
    let g = |mu: f64| norm * (-0.5 * strength * (k - mu).powi(2)).exp();
    p_plus * g(1.0) + (1.0 - p_plus) * g(-1.0)
}

/// Differential entropy of the readout mixture divided by β.
///
/// Experimental: this can be negative and is not a Landauer bound.
pub fn readout_differential_entropy(p_plus: f64, strength: f64, beta: f64) -> f64 {
    let sigma = strength.powf(-0.5);
    let (lo, hi) = (-1.0 - 12.0 * sigma, 1.0 + 12.0 * sigma);
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let f = |k: f64| {
        let d = readout_density(p_plus, strength, k);
        if d > 0.0 {
            -d * d.ln()
        } else {
            0.0
        }
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0 / beta
}

/// Expected post-measurement purity γ̄ of a κ-measurement along θ, for states
/// in the x–z plane of the Bloch sphere.
///
/// γ̄ = 1 − ½(1 − l²)(1 − |r|²)/(1 − l²(r·n)²) with l = 2κ − 1 and
/// n = (sin θ, cos θ) the measurement axis in (x, z).
pub fn average_post_measurement_purity(rho: &DensityMatrix, kappa: f64, theta: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&kappa) {
        return Err(Error::InvalidParameter(format!("kappa must lie in [1/2, 1], got {kappa}")));
    }
    let r = bloch_vector(rho)?;
    if r.ry.abs() > 1e-8 {
        return Err(Error::OutOfScope(format!("state has ry = {:e}; formula needs ry = 0", r.ry)));
    }
    let l = 2.0 * kappa - 1.0;
    let r2 = r.rx * r.rx + r.rz * r.rz;
    let proj = r.rx * theta.sin() + r.rz * theta.cos();
    let denom = 1.0 - l * l * proj * proj;
    if denom <= 0.0 {
        // Projective measurement of an eigenstate: the outcome is certain and pure.
        return Ok(1.0);
    }
    Ok(1.0 - 0.5 * (1.0 - l * l) * (1.0 - r2) / denom)
}
