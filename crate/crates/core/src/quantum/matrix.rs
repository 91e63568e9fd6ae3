use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAX_DIM: usize = 4;

/// Dense complex matrix of dimension 2 or 4, stored row-major inline.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::ShapeMismatch { expected: r.re.len(), got: r.im.len() });
        }
        let entries: Vec<C64> = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        ComplexMatrix::from_rows(r.dim, &entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            dim: m.dim,
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        _ => Err(Error::InvalidDimension(format!("dimension {dim} is not 2 or 4"))),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zeros_unchecked(dim))
    }

    pub(crate) fn zeros_unchecked(dim: usize) -> Self {
        ComplexMatrix { dim, data: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::identity_unchecked(dim))
    }

    pub(crate) fn identity_unchecked(dim: usize) -> Self {
        let mut m = Self::zeros_unchecked(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major entries; `entries.len()` must be `dim²`.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch { expected: dim * dim, got: entries.len() });
        }
        let mut m = Self::zeros_unchecked(dim);
        m.data[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        check_dim(diag.len())?;
        let mut m = Self::zeros_unchecked(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Result<Self> {
        check_dim(a.len())?;
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch { expected: a.len(), got: b.len() });
        }
        let n = a.len();
        let mut m = Self::zeros_unchecked(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros_unchecked(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for z in m.data.iter_mut() {
            *z = z.conj();
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for z in m.data.iter_mut() {
            *z *= s;
        }
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.as_slice().iter().zip(other.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// ‖A − A†‖_max.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale_real(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.dagger()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Kronecker product; fails when the result would exceed dimension 4.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.dim * other.dim;
        if n > MAX_DIM {
            return Err(Error::InvalidDimension(format!(
                "tensor product of dimensions {} and {} exceeds {MAX_DIM}",
                self.dim, other.dim
            )));
        }
        let mut m = Self::zeros_unchecked(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        Ok(m)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut m = Self::zeros_unchecked(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut m = self;
        for (a, b) in m.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        m
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut m = self;
        for (a, b) in m.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        m
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices in the basis (|0⟩, |1⟩) with σz|1⟩ = +|1⟩.
///
/// σz = diag(−1, +1), σ₊ = |1⟩⟨0| raises the ground state |0⟩, and σy is fixed
/// by σxσy = iσz so rotations are right-handed about each axis.
pub mod pauli {
    use super::ComplexMatrix;
    use num_complex::Complex64 as C64;

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    fn m2(e: [C64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_rows(2, &e).expect("2x2")
    }

    pub fn identity() -> ComplexMatrix {
        m2([ONE, O, O, ONE])
    }

    pub fn x() -> ComplexMatrix {
        m2([O, ONE, ONE, O])
    }

    pub fn y() -> ComplexMatrix {
        m2([O, I, -I, O])
    }

    pub fn z() -> ComplexMatrix {
        m2([-ONE, O, O, ONE])
    }

    /// σ₊ = |1⟩⟨0|.
    pub fn plus() -> ComplexMatrix {
        m2([O, O, ONE, O])
    }

    /// σ₋ = |0⟩⟨1|.
    pub fn minus() -> ComplexMatrix {
        m2([O, ONE, O, O])
    }

    /// σ_θ = cos θ σz + sin θ σx.
    pub fn theta(theta: f64) -> ComplexMatrix {
        z().scale_real(theta.cos()) + x().scale_real(theta.sin())
    }
}
