use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues_hermitian, eigh, sqrt_psd, sqrt_psd_spectrum};
use super::{pauli, ComplexMatrix};
use crate::{Error, Result};

/// Invariant tolerance for Hermiticity, trace and positivity.
pub const STATE_TOL: f64 = 1e-10;
/// Violations up to this size are repaired instead of rejected.
pub const REPAIR_TOL: f64 = 1e-6;

/// Validated density matrix (Hermitian, unit trace, positive semidefinite).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix(ComplexMatrix);

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Main,
    Auxiliary,
}

impl DensityMatrix {
    /// Validate `m`, repairing drift inside [`STATE_TOL`, `REPAIR_TOL`] by
    /// Hermitization, eigenvalue clipping and trace renormalization.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = m.hermiticity_error();
        if herm > REPAIR_TOL {
            return Err(Error::InvalidState(format!("Hermiticity violated by {herm:e}")));
        }
        let mut h = if herm > STATE_TOL { m.hermitian_part() } else { m };

        let tr_err = (h.trace() - C64::new(1.0, 0.0)).norm();
        if tr_err > REPAIR_TOL {
            return Err(Error::InvalidState(format!("trace off by {tr_err:e}")));
        }

        let min_eig = eigenvalues_hermitian(&h)?[0];
        if min_eig < -REPAIR_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        if min_eig < -STATE_TOL {
            let e = eigh(&h)?;
            h = e.map(|l| C64::new(l.max(0.0), 0.0)).hermitian_part();
        }

        let tr = h.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            h = h.scale_real(1.0 / tr);
        }
        Ok(DensityMatrix(h))
    }

    /// Normalize a positive matrix by its trace (e.g. an unnormalized
    /// post-measurement state), then validate.
    pub fn normalized(m: ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize trace {tr:e}")));
        }
        Self::new(m.hermitian_part().scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(DensityMatrix(ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64)))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v)?)
    }

    /// Computational-basis projector |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        let mut d = vec![0.0; dim];
        if k >= dim {
            return Err(Error::InvalidState(format!("basis index {k} out of range")));
        }
        d[k] = 1.0;
        Self::diagonal(&d)
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(populations)?)
    }

    /// ρ = (I + r·σ)/2.
    pub fn from_bloch(r: BlochVector) -> Result<Self> {
        let m =
            pauli::identity() + pauli::x().scale_real(r.rx) + pauli::y().scale_real(r.ry) + pauli::z().scale_real(r.rz);
        Self::new(m.scale_real(0.5))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Population of computational-basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.0.conjugate_by(u))
    }
}

/// Bloch vector with components r_i = Tr[ρσ_i].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Self {
        BlochVector { rx, ry, rz }
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.kron(b)
}

/// ρ_m ⊗ ρ_a.
pub fn product_state(main: &DensityMatrix, aux: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(tensor_product(main.matrix(), aux.matrix())?)
}

/// Trace out the complementary qubit of a two-qubit state (ordering main ⊗ aux).
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDimension(format!("partial trace needs dim 4, got {}", rho.dim())));
    }
    let r = rho.matrix();
    let mut out = ComplexMatrix::zeros_unchecked(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::Main => r[(2 * i, 2 * j)] + r[(2 * i + 1, 2 * j + 1)],
                Subsystem::Auxiliary => r[(i, j)] + r[(2 + i, 2 + j)],
            };
        }
    }
    DensityMatrix::new(out)
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("Bloch vector needs dim 2, got {}", rho.dim())));
    }
    let m = rho.matrix();
    Ok(BlochVector { rx: 2.0 * m[(0, 1)].re, ry: 2.0 * m[(0, 1)].im, rz: m[(1, 1)].re - m[(0, 0)].re })
}

/// Tr[ρ²].
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDimension(format!("concurrence needs dim 4, got {}", rho.dim())));
    }
    let yy = pauli::y().kron(&pauli::y())?;
    let r = rho.matrix();
    let tilde = yy * r.conj() * yy;
    let s = sqrt_psd(r)?;
    let m = (s * tilde * s).hermitian_part();
    let mut lambdas = sqrt_psd_spectrum(&eigenvalues_hermitian(&m)?);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Uhlmann fidelity F = (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::ShapeMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    let s = sqrt_psd(rho.matrix())?;
    let inner = (s * *sigma.matrix() * s).hermitian_part();
    let tr: f64 = sqrt_psd_spectrum(&eigenvalues_hermitian(&inner)?).iter().sum();
    Ok((tr * tr).min(1.0))
}
