mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qdemon::quantum::{
    bloch_vector, concurrence, eigenvalues_hermitian, eigh, fidelity, partial_trace, pauli, product_state, purity,
    sqrt_psd, unitary_propagator, BlochVector, ComplexMatrix, DensityMatrix, Subsystem,
};
use qdemon::{rng_stream, Error};

use common::{random_hermitian, random_ket, random_state};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn pauli_algebra() {
    let (x, y, z, id) = (pauli::x(), pauli::y(), pauli::z(), pauli::identity());
    for p in [x, y, z] {
        assert!((p * p).max_abs_diff(&id) < 1e-15);
    }
    // Right-handed: σxσy = iσz.
    assert!((x * y).max_abs_diff(&z.scale(C64::new(0.0, 1.0))) < 1e-15);
    // |0⟩ is the −1 eigenvector of σz, i.e. the ground state of (u E₀/2) σz.
    assert_eq!(z[(0, 0)], c(-1.0));
    assert_eq!(z[(1, 1)], c(1.0));
}

#[test]
fn bloch_round_trip_and_purity() {
    let r = BlochVector::new(0.3, -0.4, 0.5);
    let rho = DensityMatrix::from_bloch(r).unwrap();
    let back = bloch_vector(&rho).unwrap();
    assert!((back.rx - 0.3).abs() < 1e-15 && (back.ry + 0.4).abs() < 1e-15 && (back.rz - 0.5).abs() < 1e-15);
    // Tr ρ² = (1 + |r|²)/2.
    assert!((purity(&rho) - 0.5 * (1.0 + 0.5)).abs() < 1e-14);
    // ⟨σz⟩ = p1 − p0 in this basis.
    assert!((rho.population(1) - rho.population(0) - 0.5).abs() < 1e-15);
}

#[test]
fn density_matrix_validation() {
    assert!(matches!(DensityMatrix::diagonal(&[0.6, 0.6]), Err(Error::InvalidState(_))));
    assert!(matches!(DensityMatrix::diagonal(&[1.2, -0.2]), Err(Error::InvalidState(_))));
    let nonherm = ComplexMatrix::from_rows(2, &[c(0.5), c(0.3), c(0.0), c(0.5)]).unwrap();
    assert!(DensityMatrix::new(nonherm).is_err());
    let nan = ComplexMatrix::from_rows(2, &[c(f64::NAN), c(0.0), c(0.0), c(1.0)]).unwrap();
    assert!(DensityMatrix::new(nan).is_err());
    // Drift below the repair tolerance is absorbed.
    let drift = ComplexMatrix::from_rows(2, &[c(0.5 + 1e-8), c(0.0), c(0.0), c(0.5)]).unwrap();
    let rho = DensityMatrix::new(drift).unwrap();
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    let slightly_negative = ComplexMatrix::from_rows(2, &[c(1.0 + 1e-8), c(0.0), c(0.0), c(-1e-8)]).unwrap();
    let rho = DensityMatrix::new(slightly_negative).unwrap();
    assert!(common::min_eigenvalue(rho.matrix()) >= -1e-15);
}

#[test]
fn eigendecomposition_residuals() {
    let mut rng = rng_stream(11, 0);
    for dim in [2, 4] {
        for _ in 0..200 {
            let a = random_hermitian(dim, &mut rng);
            let e = eigh(&a).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let v = e.vectors;
            // Independent checks: V unitary and A V = V Λ.
            assert!((v.dagger() * v).max_abs_diff(&ComplexMatrix::identity(dim).unwrap()) < 1e-11);
            let lambda = ComplexMatrix::from_diagonal(&e.values).unwrap();
            assert!((a * v).max_abs_diff(&(v * lambda)) < 1e-10);
            // Trace and Frobenius norm are spectral invariants.
            let tr: f64 = e.values.iter().sum();
            assert!((tr - a.trace().re).abs() < 1e-11);
            let fro2: f64 = e.values.iter().map(|l| l * l).sum();
            assert!((fro2 - a.frobenius_norm().powi(2)).abs() < 1e-9 * fro2.max(1.0));
            let closed = eigenvalues_hermitian(&a).unwrap();
            for (x, y) in closed.iter().zip(&e.values) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn eigensolver_rejects_non_hermitian() {
    let m = ComplexMatrix::from_rows(2, &[c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
    assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
}

#[test]
fn matrix_functions() {
    let mut rng = rng_stream(12, 0);
    for _ in 0..50 {
        let rho = random_state(4, &mut rng);
        let s = sqrt_psd(rho.matrix()).unwrap();
        assert!((s * s).max_abs_diff(rho.matrix()) < 1e-11);
        let h = random_hermitian(4, &mut rng);
        let u = unitary_propagator(&h, 0.37).unwrap();
        assert!((u * u.dagger()).max_abs_diff(&ComplexMatrix::identity(4).unwrap()) < 1e-11);
        // Group property U(t)U(s) = U(t + s).
        let u2 = unitary_propagator(&h, 0.74).unwrap();
        assert!((u * u).max_abs_diff(&u2) < 1e-11);
    }
    // exp(−iσx π/2) = −iσx.
    let u = unitary_propagator(&pauli::x(), std::f64::consts::FRAC_PI_2).unwrap();
    assert!(u.max_abs_diff(&pauli::x().scale(C64::new(0.0, -1.0))) < 1e-14);
}

#[test]
fn partial_trace_of_products() {
    let mut rng = rng_stream(13, 0);
    for _ in 0..50 {
        let a = random_state(2, &mut rng);
        let b = random_state(2, &mut rng);
        let ab = product_state(&a, &b).unwrap();
        assert!(partial_trace(&ab, Subsystem::Main).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-14);
        assert!(partial_trace(&ab, Subsystem::Auxiliary).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-14);
    }
    // Ordering main ⊗ aux: |1⟩_m|0⟩_a is basis index 2.
    let s = product_state(&DensityMatrix::basis(2, 1).unwrap(), &DensityMatrix::basis(2, 0).unwrap()).unwrap();
    assert_eq!(s.population(2), 1.0);
}

#[test]
fn concurrence_reference_values() {
    let bell = DensityMatrix::pure(&[c(SQRT_HALF), c(0.0), c(0.0), c(SQRT_HALF)]).unwrap();
    assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-10);
    let singlet = DensityMatrix::pure(&[c(0.0), c(SQRT_HALF), c(-SQRT_HALF), c(0.0)]).unwrap();
    assert!((concurrence(&singlet).unwrap() - 1.0).abs() < 1e-10);
    // Pure state cosθ|00⟩ + sinθ|11⟩ has C = |sin 2θ|.
    for theta in [0.1, 0.4, 0.7, 1.2] {
        let psi = DensityMatrix::pure(&[c(f64::cos(theta)), c(0.0), c(0.0), c(f64::sin(theta))]).unwrap();
        let got = concurrence(&psi).unwrap();
        assert!((got - (2.0 * theta).sin().abs()).abs() < 1e-9, "{got} vs {}", (2.0 * theta).sin());
    }
    // Werner state p|Φ⁺⟩⟨Φ⁺| + (1−p) I/4 has C = max(0, (3p − 1)/2).
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8] {
        let m = bell.matrix().scale_real(p) + ComplexMatrix::identity(4).unwrap().scale_real((1.0 - p) / 4.0);
        let w = DensityMatrix::new(m).unwrap();
        let expected = (1.5 * p - 0.5).max(0.0);
        assert!((concurrence(&w).unwrap() - expected).abs() < 1e-9, "p = {p}");
    }
    let mut rng = rng_stream(14, 0);
    for _ in 0..30 {
        let prod = product_state(&random_state(2, &mut rng), &random_state(2, &mut rng)).unwrap();
        assert!(concurrence(&prod).unwrap() < 1e-7);
    }
}

#[test]
fn fidelity_reference_values() {
    let mut rng = rng_stream(15, 0);
    for dim in [2, 4] {
        for _ in 0..30 {
            let a = random_ket(dim, &mut rng);
            let b = random_ket(dim, &mut rng);
            let overlap: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            let f = fidelity(&DensityMatrix::pure(&a).unwrap(), &DensityMatrix::pure(&b).unwrap()).unwrap();
            assert!((f - overlap.norm_sqr()).abs() < 1e-8, "{f} vs {}", overlap.norm_sqr());
        }
    }
    // Commuting states: (Σ √(p q))².
    let p = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
    let q = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
    let expected = ((0.2f64 * 0.6).sqrt() + (0.8f64 * 0.4).sqrt()).powi(2);
    assert!((fidelity(&p, &q).unwrap() - expected).abs() < 1e-12);
}

proptest! {
    #[test]
    fn bloch_ball_states_are_valid(rx in -1.0..1.0f64, ry in -1.0..1.0f64, rz in -1.0..1.0f64) {
        let n = (rx * rx + ry * ry + rz * rz).sqrt();
        let s = if n > 1.0 { 1.0 / n } else { 1.0 };
        let rho = DensityMatrix::from_bloch(BlochVector::new(rx * s, ry * s, rz * s)).unwrap();
        prop_assert!(rho.matrix().hermiticity_error() < 1e-15);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        prop_assert!(common::min_eigenvalue(rho.matrix()) > -1e-12);
        let p = purity(&rho);
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn unitary_conjugation_preserves_spectrum(seed in 0u64..1000) {
        let mut rng = rng_stream(seed, 7);
        let rho = random_state(4, &mut rng);
        let u = unitary_propagator(&random_hermitian(4, &mut rng), 1.0).unwrap();
        let out = rho.conjugate_by(&u).unwrap();
        let a = eigenvalues_hermitian(rho.matrix()).unwrap();
        let b = eigenvalues_hermitian(out.matrix()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((purity(&rho) - purity(&out)).abs() < 1e-12);
    }
}
