//! Hermitian eigensolvers for dimensions 2 and 4.
//!
//! 2×2 eigenvalues use the closed form. Eigenvectors, and everything for 4×4,
//! come from cyclic complex Jacobi rotations.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::{Error, Result};

/// Inputs further than this from Hermitian are rejected.
pub const HERMITIAN_TOL: f64 = 1e-9;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition A = V diag(λ) V† with λ ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL * m.frobenius_norm().max(1.0) || !err.is_finite() {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    if m.dim() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return Ok(vec![mean - r, mean + r]);
    }
    Ok(jacobi(m).values)
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigh> {
    check_hermitian(m)?;
    Ok(jacobi(m))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(m: &ComplexMatrix) -> Eigh {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity_unchecked(n);
    let tol = OFF_DIAGONAL_TOL * m.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // D = diag(1, e^{-iφ}) makes the pivot real, then a real rotation
                // by θ = ½ atan2(2r, a_pp − a_qq) annihilates it.
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(a[(p, p)].re - a[(q, q)].re);
                let (s, c) = theta.sin_cos();
                let mut j = ComplexMatrix::identity_unchecked(n);
                j[(p, p)] = C64::new(c, 0.0);
                j[(q, p)] = phase.conj() * s;
                j[(p, q)] = C64::new(-s, 0.0);
                j[(q, q)] = phase.conj() * c;
                a = j.dagger() * a * j;
                v = v * j;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &k| a[(i, i)].re.total_cmp(&a[(k, k)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros_unchecked(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Eigh { values, vectors }
}

impl Eigh {
    /// V diag(f(λ)) V†.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros_unchecked(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Relative size below which an eigenvalue of a positive semidefinite matrix is
/// rounding noise. Square roots amplify such noise to ~1e-8, so it is zeroed.
pub const PSD_NOISE: f64 = 1e-13;

/// √λ for the eigenvalues of a positive semidefinite matrix, treating values
/// below `PSD_NOISE · max λ` as exact zeros.
pub fn sqrt_psd_spectrum(values: &[f64]) -> Vec<f64> {
    let top = values.iter().copied().fold(0.0, f64::max);
    values.iter().map(|&l| if l > PSD_NOISE * top { l.sqrt() } else { 0.0 }).collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(m)?;
    let floor = PSD_NOISE * e.values.iter().copied().fold(0.0, f64::max);
    Ok(e.map(|l| C64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0)))
}

/// exp(−i H t) for Hermitian H.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(eigh(h)?.map(|l| C64::from_polar(1.0, -l * t)))
}
