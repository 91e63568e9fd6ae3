//! Random small soft actor-critic instances and finite-difference checks of
//! every analytic gradient path.

use qdemon::rng_stream;
use qdemon::sac::losses::{critic_loss, critic_targets, policy_loss, temperature_gradients, temperature_losses};
use qdemon::sac::{Batch, CriticPair, FeedForwardNet, TemperaturePair, N_DISCRETE};
use qdemon::SimRng;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{check_gradient, GradCheck};

pub const STATE_DIM: usize = 5;
pub const HIDDEN: [usize; 2] = [8, 8];
pub const BATCH: usize = 6;
/// Finite-difference step and relative-error floor for near-zero components.
pub const H: f64 = 1e-5;
pub const FLOOR: f64 = 1e-6;

pub struct Instance {
    pub batch: Batch,
    pub critics: CriticPair,
    pub policy: FeedForwardNet,
    pub temps: TemperaturePair,
    pub xi: Vec<f64>,
    pub xi_next: Vec<f64>,
}

fn normals(n: usize, rng: &mut SimRng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = rng_stream(seed, 77);
    let critics = CriticPair::new(STATE_DIM, &HIDDEN, &mut rng).unwrap();
    let mut sizes = vec![STATE_DIM];
    sizes.extend_from_slice(&HIDDEN);
    sizes.push(3 * N_DISCRETE);
    let policy = FeedForwardNet::new(&sizes, &mut rng).unwrap();
    let batch = Batch {
        size: BATCH,
        state_dim: STATE_DIM,
        states: normals(BATCH * STATE_DIM, &mut rng),
        actions: (0..BATCH).map(|_| rng.random_range(0..N_DISCRETE)).collect(),
        u_norm: (0..BATCH).map(|_| rng.random_range(-0.99..0.99)).collect(),
        rewards: normals(BATCH, &mut rng),
        next_states: normals(BATCH * STATE_DIM, &mut rng),
    };
    let temps = TemperaturePair { beta_d: rng.random_range(-3.0..0.5), beta_c: rng.random_range(-3.0..0.5) };
    let xi = normals(BATCH * N_DISCRETE, &mut rng);
    let xi_next = normals(BATCH * N_DISCRETE, &mut rng);
    Instance { batch, critics, policy, temps, xi, xi_next }
}

/// Reverse-mode gradient of a random scalar readout of a bare network.
pub fn net_check(seed: u64) -> GradCheck {
    let mut rng = rng_stream(seed, 78);
    let sizes = [4, 8, 8, 3];
    let net = FeedForwardNet::new(&sizes, &mut rng).unwrap();
    let batch = 5;
    let x = normals(batch * 4, &mut rng);
    let w = normals(batch * 3, &mut rng);
    let loss = |n: &FeedForwardNet| -> f64 {
        let y = n.forward_batch(&x, batch).unwrap();
        y.output().iter().zip(&w).map(|(a, b)| 0.5 * a * a * b + a).sum()
    };
    let cache = net.forward_batch(&x, batch).unwrap();
    let d_out: Vec<f64> = cache.output().iter().zip(&w).map(|(a, b)| a * b + 1.0).collect();
    let mut grad = vec![0.0; net.params().len()];
    net.backward(&cache, &d_out, Some(&mut grad), false).unwrap();
    let mut f = |p: &[f64]| loss(&FeedForwardNet::from_params(&sizes, p.to_vec()).unwrap());
    check_gradient(&mut f, net.params(), &grad, H, FLOOR)
}

/// Critic loss gradients for both live critics, targets held fixed.
pub fn critic_check(seed: u64) -> GradCheck {
    let inst = instance(seed);
    let y = critic_targets(&inst.batch, &inst.critics, &inst.policy, &inst.temps, 0.9, &inst.xi_next).unwrap();
    let cl = critic_loss(&inst.batch, &inst.critics, &y).unwrap();
    let mut out = GradCheck::default();
    for i in 0..2 {
        let sizes = inst.critics.q[i].sizes().to_vec();
        let mut f = |p: &[f64]| {
            let mut c = inst.critics.clone();
            c.q[i] = FeedForwardNet::from_params(&sizes, p.to_vec()).unwrap();
            critic_loss(&inst.batch, &c, &y).unwrap().loss[i]
        };
        out.merge(check_gradient(&mut f, inst.critics.q[i].params(), &cl.grads[i], H, FLOOR));
    }
    out
}

/// Policy loss gradient, including the squashing Jacobian and the path
/// through the critics' action input.
pub fn policy_check(seed: u64) -> GradCheck {
    let inst = instance(seed);
    let states = &inst.batch.states;
    let pl = policy_loss(states, &inst.critics, &inst.policy, &inst.temps, &inst.xi).unwrap();
    let sizes = inst.policy.sizes().to_vec();
    let mut f = |p: &[f64]| {
        let net = FeedForwardNet::from_params(&sizes, p.to_vec()).unwrap();
        policy_loss(states, &inst.critics, &net, &inst.temps, &inst.xi).unwrap().loss
    };
    check_gradient(&mut f, inst.policy.params(), &pl.grad, H, FLOOR)
}

/// Temperature-loss gradients with respect to the log-temperatures.
pub fn temperature_check(seed: u64) -> GradCheck {
    let inst = instance(seed);
    let pl = policy_loss(&inst.batch.states, &inst.critics, &inst.policy, &inst.temps, &inst.xi).unwrap();
    let entropy = (pl.entropy_d, pl.entropy_c);
    let mut rng = rng_stream(seed, 79);
    let target = (rng.random_range(-1.0..1.0), rng.random_range(-3.0..1.0));
    let (gd, gc) = temperature_gradients(&inst.temps, entropy, target);
    let mut f = |b: &[f64]| {
        let t = TemperaturePair { beta_d: b[0], beta_c: b[1] };
        let (ld, lc) = temperature_losses(&t, entropy, target);
        ld + lc
    };
    check_gradient(&mut f, &[inst.temps.beta_d, inst.temps.beta_c], &[gd, gc], H, FLOOR)
}
