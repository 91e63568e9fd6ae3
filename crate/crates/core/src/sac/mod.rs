//! Hybrid discrete/continuous soft actor-critic.
//!
//! Networks are small multilayer perceptrons with hand-written reverse-mode
//! gradients. The policy picks one of three discrete actions and, for each, a
//! squashed-Gaussian continuous control; twin critics score every discrete
//! action at a given control.

mod agent;
mod buffer;
mod critic;
pub mod losses;
mod net;
mod optim;
mod policy;
mod schedule;

pub use agent::{Agent, AgentPolicy, CurveRow, Hyperparameters, UpdateStats, CHECKPOINT_VERSION};
pub use buffer::{Batch, ReplayBuffer, Transition};
pub use critic::{branch_inputs, CriticPair};
pub use net::{FeedForwardNet, ForwardCache};
pub use optim::Adam;
pub use policy::{
    log_one_minus_tanh_sq, log_softmax, sigma_of, squashed_log_prob, PolicyHead, PolicyParams, PolicySample,
    N_DISCRETE, SIGMA_EPS,
};
pub use schedule::{EntropySchedule, TemperaturePair};
