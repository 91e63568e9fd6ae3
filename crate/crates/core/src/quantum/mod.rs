//! Dense linear algebra and state utilities for one and two qubits.
//!
//! Two-qubit states are ordered main ⊗ auxiliary, so basis index `2m + a`.

pub mod eigen;
mod matrix;
mod state;

pub use eigen::{eigenvalues_hermitian, eigh, sqrt_psd, sqrt_psd_spectrum, unitary_propagator, Eigh, PSD_NOISE};
pub use matrix::{pauli, ComplexMatrix};
pub use state::{
    bloch_vector, concurrence, fidelity, partial_trace, product_state, purity, tensor_product, BlochVector,
    DensityMatrix, Subsystem, REPAIR_TOL, STATE_TOL,
};

pub use num_complex::Complex64 as C64;
