//! Evolution channels: qubit rotations, two-qubit Hamiltonian evolution and
//! Lindblad thermalization.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::quantum::{bloch_vector, pauli, unitary_propagator, ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// Gap arguments closer to zero than this make n(x) diverge.
pub const SINGULAR_GAP: f64 = 1e-12;

/// How the Bose-Einstein argument is formed from the control u.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateConvention {
    /// x = β E₀ u, the instantaneous gap in units of temperature.
    #[default]
    GapTimesBeta,
    /// x = β u, treating u itself as an energy.
    BetaTimesControl,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalBathParams {
    pub beta: f64,
    pub gamma: f64,
    pub e0: f64,
    #[serde(default)]
    pub rate_convention: RateConvention,
}

/// (e^x − 1)⁻¹.
pub fn bose_einstein(x: f64) -> Result<f64> {
    if x.abs() < SINGULAR_GAP || x.is_nan() {
        return Err(Error::SingularGap(x.abs()));
    }
    Ok(1.0 / x.exp_m1())
}

impl ThermalBathParams {
    pub fn new(beta: f64, gamma: f64, e0: f64) -> Result<Self> {
        let p = ThermalBathParams { beta, gamma, e0, rate_convention: RateConvention::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma), ("e0", self.e0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn rate_argument(&self, u: f64) -> f64 {
        match self.rate_convention {
            RateConvention::GapTimesBeta => self.beta * self.e0 * u,
            RateConvention::BetaTimesControl => self.beta * u,
        }
    }

    /// (γ₊, γ₋): absorption on σ₊ and emission on σ₋.
    pub fn rates(&self, u: f64) -> Result<(f64, f64)> {
        let x = self.rate_argument(u);
        Ok((self.gamma * bose_einstein(x)?.abs(), self.gamma * bose_einstein(-x)?.abs()))
    }

    /// Stationary population of |1⟩ at control u.
    pub fn stationary_population(&self, u: f64) -> Result<f64> {
        let x = self.rate_argument(u);
        if x.abs() < SINGULAR_GAP {
            return Err(Error::SingularGap(x.abs()));
        }
        Ok(1.0 / (x.exp() + 1.0))
    }

    /// Fixed point of the thermalization channel at control u.
    pub fn gibbs_state(&self, u: f64) -> Result<DensityMatrix> {
        let p1 = self.stationary_population(u)?;
        DensityMatrix::diagonal(&[1.0 - p1, p1])
    }
}

/// Exact single-qubit thermalization map over one step at constant u.
///
/// Populations relax to p* at rate Γ_tot = γ₊ + γ₋; coherences precess at the
/// gap frequency and decay at Γ_tot/2. The map is linear, so it also acts on the
/// non-normalized 2×2 blocks of a two-qubit state.
#[derive(Clone, Copy, Debug)]
pub struct ThermalChannel {
    p_star: f64,
    decay: f64,
    coherence: C64,
}

impl ThermalChannel {
    pub fn new(u: f64, dt: f64, bath: &ThermalBathParams) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let (gp, gm) = bath.rates(u)?;
        let total = gp + gm;
        let omega = u * bath.e0;
        Ok(ThermalChannel {
            p_star: gp / total,
            decay: (-total * dt).exp(),
            coherence: C64::new(-0.5 * total * dt, omega * dt).exp(),
        })
    }

    /// Apply to [b00, b01, b10, b11].
    pub fn apply_block(&self, b: [C64; 4]) -> [C64; 4] {
        let t = b[0] + b[3];
        let b11 = t * self.p_star + (b[3] - t * self.p_star) * self.decay;
        [t - b11, b[1] * self.coherence, b[2] * self.coherence.conj(), b11]
    }
}

/// Thermalize one qubit for `dt` at control `u`; returns the state and the heat
/// drawn from the bath.
pub fn lindblad_step(rho: &DensityMatrix, u: f64, dt: f64, bath: &ThermalBathParams) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("expected a single qubit, got dim {}", rho.dim())));
    }
    let ch = ThermalChannel::new(u, dt, bath)?;
    let m = rho.matrix();
    let out = ch.apply_block([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]);
    let next = DensityMatrix::new(ComplexMatrix::from_rows(2, &out)?)?;
    let heat = u * bath.e0 * (next.population(1) - rho.population(1));
    Ok((next, heat))
}

/// Thermalize the main qubit of a two-qubit state; the auxiliary qubit is
/// untouched and heat is counted against the main-qubit Hamiltonian.
pub fn lindblad_step_main_of_two(
    rho: &DensityMatrix,
    u: f64,
    dt: f64,
    bath: &ThermalBathParams,
) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDimension(format!("expected two qubits, got dim {}", rho.dim())));
    }
    let ch = ThermalChannel::new(u, dt, bath)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(4)?;
    for a in 0..2 {
        for b in 0..2 {
            let block = [m[(a, b)], m[(a, 2 + b)], m[(2 + a, b)], m[(2 + a, 2 + b)]];
            let r = ch.apply_block(block);
            out[(a, b)] = r[0];
            out[(a, 2 + b)] = r[1];
            out[(2 + a, b)] = r[2];
            out[(2 + a, 2 + b)] = r[3];
        }
    }
    let next = DensityMatrix::new(out)?;
    let excited = |r: &DensityMatrix| r.population(2) + r.population(3);
    let heat = u * bath.e0 * (excited(&next) - excited(rho));
    Ok((next, heat))
}

/// Fixed-substep RK4 integration of a general Lindblad equation.
///
/// Used as an independent reference for the exact channels above. Heat is
/// ∫Tr[D[ρ]H]dt by composite Simpson over the substep grid.
pub mod rk4 {
    use super::*;

    pub struct Lindbladian<'a> {
        pub hamiltonian: &'a ComplexMatrix,
        pub jumps: &'a [(f64, ComplexMatrix)],
    }

    impl Lindbladian<'_> {
        fn dissipator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
            let n = rho.dim();
            let mut d = ComplexMatrix::zeros(n).expect("dim");
            for (rate, a) in self.jumps {
                let ad = a.dagger();
                let ada = ad * *a;
                let term = *a * *rho * ad - (ada * *rho + *rho * ada).scale_real(0.5);
                d = d + term.scale_real(*rate);
            }
            d
        }

        pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
            let h = *self.hamiltonian;
            let comm = h * *rho - *rho * h;
            comm.scale(C64::new(0.0, -1.0)) + self.dissipator(rho)
        }

        fn heat_rate(&self, rho: &ComplexMatrix) -> f64 {
            (self.dissipator(rho) * *self.hamiltonian).trace().re
        }

        pub fn integrate(&self, rho: &ComplexMatrix, dt: f64, substeps: usize) -> (ComplexMatrix, f64) {
            assert!(substeps >= 2 && substeps.is_multiple_of(2), "Simpson needs an even substep count");
            let h = dt / substeps as f64;
            let mut r = *rho;
            let mut rates = vec![self.heat_rate(&r)];
            for _ in 0..substeps {
                let k1 = self.rhs(&r);
                let k2 = self.rhs(&(r + k1.scale_real(0.5 * h)));
                let k3 = self.rhs(&(r + k2.scale_real(0.5 * h)));
                let k4 = self.rhs(&(r + k3.scale_real(h)));
                r = r + (k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4).scale_real(h / 6.0);
                rates.push(self.heat_rate(&r));
            }
            let mut heat = rates[0] + rates[substeps];
            for (i, p) in rates.iter().enumerate().take(substeps).skip(1) {
                heat += if i % 2 == 1 { 4.0 * p } else { 2.0 * p };
            }
            (r, heat * h / 3.0)
        }
    }
}

/// Rotation angles φ = (φx, φy, φz), each normalized to [0, 2π).
///
/// Componentwise wrapping preserves the rotation only when a single component
/// is nonzero, which is the only case the environments issue. Multi-axis
/// rotations should set the fields directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationAngles {
    pub phi_x: f64,
    pub phi_y: f64,
    pub phi_z: f64,
}

impl RotationAngles {
    pub fn new(phi_x: f64, phi_y: f64, phi_z: f64) -> Self {
        RotationAngles { phi_x: phi_x.rem_euclid(TAU), phi_y: phi_y.rem_euclid(TAU), phi_z: phi_z.rem_euclid(TAU) }
    }

    pub fn about_y(phi: f64) -> Self {
        Self::new(0.0, phi, 0.0)
    }

    /// U = exp(−i φ·σ/2).
    pub fn unitary(&self) -> ComplexMatrix {
        let norm = (self.phi_x.powi(2) + self.phi_y.powi(2) + self.phi_z.powi(2)).sqrt();
        if norm == 0.0 {
            return pauli::identity();
        }
        let (s, c) = (0.5 * norm).sin_cos();
        let gen = pauli::x().scale_real(self.phi_x / norm)
            + pauli::y().scale_real(self.phi_y / norm)
            + pauli::z().scale_real(self.phi_z / norm);
        pauli::identity().scale_real(c) + gen.scale(C64::new(0.0, -s))
    }
}

pub fn unitary_rotate(rho: &DensityMatrix, phi: RotationAngles) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("expected a single qubit, got dim {}", rho.dim())));
    }
    rho.conjugate_by(&phi.unitary())
}

/// Rotate the Bloch vector onto the −z axis along the shortest great circle.
///
/// For states in the x–z plane this is a rotation about y. A zero Bloch vector
/// is returned unchanged.
pub fn rotate_to_negative_z(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let r = bloch_vector(rho)?;
    let norm = r.norm();
    if norm < 1e-15 {
        return Ok(*rho);
    }
    // Axis r̂ × (−ẑ) = (−ry, rx, 0)/|r|, angle between r̂ and −ẑ.
    let angle = (-r.rz / norm).clamp(-1.0, 1.0).acos();
    let (ax, ay) = (-r.ry, r.rx);
    let axis_norm = (ax * ax + ay * ay).sqrt();
    let u = if axis_norm < 1e-15 {
        if r.rz < 0.0 {
            return Ok(*rho);
        }
        RotationAngles { phi_x: 0.0, phi_y: PI, phi_z: 0.0 }.unitary()
    } else {
        let s = angle / axis_norm;
        RotationAngles { phi_x: ax * s, phi_y: ay * s, phi_z: 0.0 }.unitary()
    };
    rho.conjugate_by(&u)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interaction {
    /// σ₊σ₋ + σ₋σ₊ (rotating-wave exchange).
    #[default]
    NoCounter,
    /// σx ⊗ σx, including counter-rotating terms.
    Counter,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub e0: f64,
    pub g: f64,
    #[serde(default)]
    pub variant: Interaction,
}

impl TwoQubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!("g must be positive, got {}", self.g)));
        }
        if !(self.e0 > 0.0) {
            return Err(Error::InvalidParameter(format!("e0 must be positive, got {}", self.e0)));
        }
        Ok(())
    }

    /// π/(2g).
    pub fn tau_swap(&self) -> f64 {
        PI / (2.0 * self.g)
    }

    /// H = u(E₀/2)(σz ⊗ I + I ⊗ σz) + g H_int.
    pub fn hamiltonian(&self, u: f64) -> ComplexMatrix {
        let (i2, z) = (pauli::identity(), pauli::z());
        let local = z.kron(&i2).unwrap() + i2.kron(&z).unwrap();
        let int = match self.variant {
            Interaction::NoCounter => {
                pauli::plus().kron(&pauli::minus()).unwrap() + pauli::minus().kron(&pauli::plus()).unwrap()
            }
            Interaction::Counter => pauli::x().kron(&pauli::x()).unwrap(),
        };
        local.scale_real(0.5 * u * self.e0) + int.scale_real(self.g)
    }

    pub fn propagator(&self, u: f64, dt: f64) -> Result<ComplexMatrix> {
        unitary_propagator(&self.hamiltonian(u), dt)
    }
}

pub fn two_qubit_unitary_step(rho: &DensityMatrix, u: f64, dt: f64, params: &TwoQubitParams) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDimension(format!("expected two qubits, got dim {}", rho.dim())));
    }
    rho.conjugate_by(&params.propagator(u, dt)?)
}
