//! Reinforcement-learning Maxwell's demon for qubits coupled to a thermal bath.
//!
//! The crate simulates one or two qubits under measurement, unitary control and
//! Lindblad thermalization, wraps them as a Markov decision process, and trains a
//! hybrid discrete/continuous soft actor-critic agent to trade cooling power
//! against the Landauer cost of measurement. Interpretable baseline policies serve
//! as reference points.
//!
//! Units: ħ = 1 and β = 1 throughout, so energies are in units of 1/β and times in
//! units of βħ.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Numerical kernels index several parallel arrays by the same loop counter.
#![allow(clippy::needless_range_loop)]

pub mod baselines;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod harness;
pub mod measurement;
pub mod quantum;
pub mod sac;

pub use error::{Error, Result};

/// Random stream used by every stochastic component.
///
/// ChaCha8 is portable and serializable, which keeps runs reproducible across
/// platforms and lets checkpoints capture the exact stream position.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Build a stream from a seed and a stream index.
pub fn rng_stream(seed: u64, stream: u64) -> SimRng {
    use rand::SeedableRng;
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
