//! Shared generators for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use qdemon::quantum::{ComplexMatrix, DensityMatrix};
use qdemon::SimRng;
use rand::Rng;
use rand_distr::StandardNormal;

pub mod gradients;

pub fn gaussian_c64(rng: &mut SimRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Full-rank random state ρ = GG†/Tr(GG†) with complex Gaussian G.
pub fn random_state(dim: usize, rng: &mut SimRng) -> DensityMatrix {
    let g: Vec<C64> = (0..dim * dim).map(|_| gaussian_c64(rng)).collect();
    let g = ComplexMatrix::from_rows(dim, &g).unwrap();
    let m = g * g.dagger();
    DensityMatrix::normalized(m).unwrap()
}

/// Random normalized state vector.
pub fn random_ket(dim: usize, rng: &mut SimRng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut SimRng) -> ComplexMatrix {
    let g: Vec<C64> = (0..dim * dim).map(|_| gaussian_c64(rng)).collect();
    let g = ComplexMatrix::from_rows(dim, &g).unwrap();
    (g + g.dagger()).scale_real(0.5)
}

/// Minimum eigenvalue via the library solver; only used on validated states.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    qdemon::quantum::eigenvalues_hermitian(m).unwrap()[0]
}

/// Outcome of a finite-difference gradient comparison.
#[derive(Clone, Copy, Debug, Default)]
pub struct GradCheck {
    pub worst: f64,
    pub checked: usize,
    /// Coordinates skipped because the one-sided differences disagree, i.e. a
    /// ReLU or min() kink lies within ±h.
    pub kinks: usize,
}

impl GradCheck {
    pub fn merge(&mut self, other: GradCheck) {
        self.worst = self.worst.max(other.worst);
        self.checked += other.checked;
        self.kinks += other.kinks;
    }
}

/// Ridders' extrapolated derivative along coordinate `i`, starting from step
/// `h0` and shrinking by 1.4 per stage; returns the estimate with the smallest
/// internal error estimate.
pub fn ridders(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], i: usize, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const N: usize = 10;
    let mut xs = x.to_vec();
    let mut central = |h: f64| {
        xs[i] = x[i] + h;
        let fp = f(&xs);
        xs[i] = x[i] - h;
        let fm = f(&xs);
        xs[i] = x[i];
        (fp - fm) / (2.0 * h)
    };
    let mut a = [[0.0; N]; N];
    let mut h = h0;
    a[0][0] = central(h);
    let (mut best, mut err) = (a[0][0], f64::INFINITY);
    for k in 1..N {
        h /= CON;
        a[0][k] = central(h);
        let mut fac = CON * CON;
        for j in 1..=k {
            a[j][k] = (a[j - 1][k] * fac - a[j - 1][k - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (a[j][k] - a[j - 1][k]).abs().max((a[j][k] - a[j - 1][k - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][k];
            }
        }
        if (a[k][k] - a[k - 1][k - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

/// Compare `grad` with finite differences of `f` at `x`, coordinate by coordinate.
///
/// The reference is Ridders' extrapolation from step `h`, so sharply curved but
/// smooth regions (such as σ = √(m² + ε) near m = 0) are resolved. Relative
/// error is |g − fd| / max(|g|, |fd|, floor). A coordinate is treated as a kink,
/// and skipped, when the second differences at h and 2h disagree, which a
/// smooth function cannot do at this scale.
pub fn check_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], grad: &[f64], h: f64, floor: f64) -> GradCheck {
    assert_eq!(x.len(), grad.len());
    let f0 = f(x);
    let mut out = GradCheck::default();
    let mut xs = x.to_vec();
    for i in 0..x.len() {
        let mut at = |dx: f64| {
            xs[i] = x[i] + dx;
            let v = f(&xs);
            xs[i] = x[i];
            v
        };
        let (fp, fm, fp2, fm2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let d2_wide = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h);
        let noise = 1e-3 * (1.0 + f0.abs());
        if (d2 - d2_wide).abs() > (0.1 * d2.abs().max(d2_wide.abs())).max(noise) {
            out.kinks += 1;
            continue;
        }
        let (fd, _) = ridders(f, x, i, h);
        let rel = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(floor);
        out.worst = out.worst.max(rel);
        out.checked += 1;
    }
    out
}
