// Tabular and batch loops index several parallel arrays by the same counter.
#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qdemon::env::RegimeConfig;
use qdemon::sac::losses::{critic_targets, policy_loss, sample_branches, temperature_gradients};
use qdemon::sac::{
    Adam, Agent, Batch, CriticPair, EntropySchedule, FeedForwardNet, Hyperparameters, PolicyHead, ReplayBuffer,
    TemperaturePair, N_DISCRETE,
};
use qdemon::{rng_stream, Error};
use rand::Rng;
use rand_distr::StandardNormal;

use common::gradients::{critic_check, net_check, policy_check, temperature_check};
use common::GradCheck;

/// α = e^β underflows to exactly zero.
const ZERO_TEMP: f64 = -1000.0;

fn assert_grad(name: &str, g: GradCheck) {
    eprintln!("{name}: worst {:e}, {} checked, {} kinks", g.worst, g.checked, g.kinks);
    assert!(g.worst < 1e-4, "{name}: worst relative error {:e}", g.worst);
    assert!(g.kinks * 100 <= g.checked, "{name}: {} kinks out of {}", g.kinks, g.checked);
}

/// Straightforward re-evaluation of the documented parameter layout.
fn reference_forward(sizes: &[usize], params: &[f64], x: &[f64]) -> Vec<f64> {
    let mut a = x.to_vec();
    let mut off = 0;
    let layers = sizes.len() - 1;
    for l in 0..layers {
        let (fi, fo) = (sizes[l], sizes[l + 1]);
        let w = &params[off..off + fi * fo];
        let b = &params[off + fi * fo..off + fi * fo + fo];
        off += fi * fo + fo;
        let mut y = b.to_vec();
        for j in 0..fo {
            for i in 0..fi {
                y[j] += a[i] * w[i * fo + j];
            }
            if l + 1 < layers {
                y[j] = y[j].max(0.0);
            }
        }
        a = y;
    }
    a
}

#[test]
fn network_forward_pass() {
    let mut rng = rng_stream(71, 0);
    let sizes = [4, 8, 8, 3];
    let net = FeedForwardNet::new(&sizes, &mut rng).unwrap();
    for _ in 0..20 {
        let x: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
        let y = net.forward(&x).unwrap();
        for (a, b) in y.iter().zip(reference_forward(&sizes, net.params(), &x)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    let zero = FeedForwardNet::zeros(&sizes).unwrap();
    assert_eq!(zero.forward(&[1.0, -2.0, 3.0, 4.0]).unwrap(), vec![0.0; 3]);
    // A single identity layer passes the input through.
    let mut p = vec![0.0; 12];
    for i in 0..3 {
        p[i * 3 + i] = 1.0;
    }
    let id = FeedForwardNet::from_params(&[3, 3], p).unwrap();
    assert_eq!(id.forward(&[0.5, -1.5, 2.0]).unwrap(), vec![0.5, -1.5, 2.0]);
    assert!(matches!(net.forward(&[1.0; 3]), Err(Error::ShapeMismatch { .. })));
    assert!(FeedForwardNet::from_params(&sizes, vec![0.0; 5]).is_err());
}

#[test]
fn initialization_scheme() {
    let mut rng = rng_stream(72, 0);
    let net = FeedForwardNet::new(&[6, 16, 3], &mut rng).unwrap();
    for l in 0..net.n_layers() {
        let (w, b) = net.layer_range(l);
        let bound = 1.0 / (net.sizes()[l] as f64).sqrt();
        assert!(net.params()[w].iter().all(|v| v.abs() <= bound));
        assert!(net.params()[b].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn network_gradients() {
    // Single linear neuron with squared loss: ∂/∂(w, b) = 2(wx + b − y)(x, 1).
    let (w, b, x, y) = (0.7, -0.2, 1.3, 0.4);
    let net = FeedForwardNet::from_params(&[1, 1], vec![w, b]).unwrap();
    let cache = net.forward_batch(&[x], 1).unwrap();
    let r = w * x + b - y;
    let mut g = vec![0.0; 2];
    net.backward(&cache, &[2.0 * r], Some(&mut g), false).unwrap();
    assert!((g[0] - 2.0 * r * x).abs() < 1e-15 && (g[1] - 2.0 * r).abs() < 1e-15);
    // Constant loss: zero adjoint, zero gradient.
    let mut rng = rng_stream(73, 0);
    let big = FeedForwardNet::new(&[4, 8, 8, 3], &mut rng).unwrap();
    let cache = big.forward_batch(&[0.3; 8], 2).unwrap();
    let mut g = vec![0.0; big.params().len()];
    big.backward(&cache, &[0.0; 6], Some(&mut g), false).unwrap();
    assert!(g.iter().all(|&v| v == 0.0));
    let mut all = GradCheck::default();
    for seed in 0..50 {
        all.merge(net_check(seed));
    }
    assert_grad("network", all);
}

#[test]
fn loss_gradients_match_finite_differences() {
    let (mut c, mut p, mut t) = (GradCheck::default(), GradCheck::default(), GradCheck::default());
    for seed in 0..50 {
        c.merge(critic_check(seed));
        p.merge(policy_check(seed));
        t.merge(temperature_check(seed));
    }
    assert_grad("critic", c);
    assert_grad("policy", p);
    assert_grad("temperature", t);
}

fn small_batch(size: usize, state_dim: usize, rng: &mut qdemon::SimRng) -> Batch {
    let mut n = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
    let states = n(size * state_dim);
    let next_states = n(size * state_dim);
    let rewards = n(size);
    let u_norm = n(size).into_iter().map(f64::tanh).collect();
    Batch {
        size,
        state_dim,
        states,
        actions: (0..size).map(|i| i % N_DISCRETE).collect(),
        u_norm,
        rewards,
        next_states,
    }
}

#[test]
fn critic_target_reductions() {
    let mut rng = rng_stream(74, 0);
    let critics = CriticPair::new(3, &[8], &mut rng).unwrap();
    let policy = PolicyHead::new(3, &[8], -1.0, 1.0, &mut rng).unwrap().net;
    let batch = small_batch(7, 3, &mut rng);
    let xi: Vec<f64> = (0..21).map(|_| rng.sample(StandardNormal)).collect();
    let temps = TemperaturePair { beta_d: 0.3, beta_c: -0.4 };
    // No discounting: the target is the reward.
    let y = critic_targets(&batch, &critics, &policy, &temps, 0.0, &xi).unwrap();
    assert_eq!(y, batch.rewards);
    // Zero temperatures and identical critics: y = r + γ Σ_d π_d Q_targ(s', t_d)[d].
    let mut twin = critics.clone();
    twin.target[1] = twin.target[0].clone();
    let cold = TemperaturePair { beta_d: ZERO_TEMP, beta_c: ZERO_TEMP };
    let y = critic_targets(&batch, &twin, &policy, &cold, 0.9, &xi).unwrap();
    let s = sample_branches(&policy, &batch.next_states, &xi).unwrap();
    for b in 0..batch.size {
        let sn = &batch.next_states[b * 3..(b + 1) * 3];
        let a = s.probs(b);
        let v: f64 = (0..N_DISCRETE)
            .map(|d| {
                let mut input = sn.to_vec();
                input.push(s.t[b * N_DISCRETE + d]);
                a[d] * twin.target[0].forward(&input).unwrap()[d]
            })
            .sum();
        assert!((y[b] - (batch.rewards[b] + 0.9 * v)).abs() < 1e-12);
    }
}

#[test]
fn critic_regression_reaches_the_soft_q_fixed_point() {
    // Two one-hot states, three actions, deterministic moves s' = (s + d) mod 2.
    // A zero policy net is uniform over actions with a fixed control t = 0.
    let (gamma, alpha_d) = (0.5, 0.4);
    let reward = [[1.0, -0.5, 0.2], [0.0, 0.8, -1.0]];
    let next = |s: usize, d: usize| (s + d) % 2;
    let mut q_star = [[0.0; 3]; 2];
    for _ in 0..200 {
        let mut q = q_star;
        for s in 0..2 {
            for d in 0..3 {
                let sn = next(s, d);
                let v: f64 = (0..3).map(|e| (q_star[sn][e] + alpha_d * 3f64.ln()) / 3.0).sum();
                q[s][d] = reward[s][d] + gamma * v;
            }
        }
        q_star = q;
    }
    let one_hot = |s: usize| if s == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
    let mut batch = Batch { size: 6, state_dim: 2, ..Batch::default() };
    for s in 0..2 {
        for d in 0..3 {
            batch.states.extend(one_hot(s));
            batch.next_states.extend(one_hot(next(s, d)));
            batch.actions.push(d);
            batch.u_norm.push(0.0);
            batch.rewards.push(reward[s][d]);
        }
    }
    let policy = FeedForwardNet::zeros(&[2, 4, 9]).unwrap();
    let temps = TemperaturePair { beta_d: alpha_d.ln(), beta_c: ZERO_TEMP };
    let mut rng = rng_stream(75, 0);
    let mut critics = CriticPair::new(2, &[16, 16], &mut rng).unwrap();
    let n = critics.q[0].params().len();
    let mut opts = [Adam::new(n, 3e-3), Adam::new(n, 3e-3)];
    let xi = vec![0.0; 18];
    for it in 0..8000 {
        if it == 5000 {
            opts.iter_mut().for_each(|o| o.lr = 3e-4);
        }
        let y = critic_targets(&batch, &critics, &policy, &temps, gamma, &xi).unwrap();
        let cl = qdemon::sac::losses::critic_loss(&batch, &critics, &y).unwrap();
        for i in 0..2 {
            opts[i].step(critics.q[i].params_mut(), &cl.grads[i]);
        }
        critics.polyak_update(0.9);
    }
    for s in 0..2 {
        let mut input = one_hot(s).to_vec();
        input.push(0.0);
        for net in &critics.q {
            let q = net.forward(&input).unwrap();
            for d in 0..3 {
                assert!((q[d] - q_star[s][d]).abs() < 1e-3, "Q({s}, {d}) = {} vs {}", q[d], q_star[s][d]);
            }
        }
    }
}

/// Critic pair whose outputs ignore the state and control: Q = `bias`.
fn flat_critics(state_dim: usize, bias: [f64; 3]) -> CriticPair {
    let mut p = vec![0.0; (state_dim + 1) * 3 + 3];
    p[(state_dim + 1) * 3..].copy_from_slice(&bias);
    let net = FeedForwardNet::from_params(&[state_dim + 1, 3], p).unwrap();
    CriticPair { q: [net.clone(), net.clone()], target: [net.clone(), net] }
}

/// Linear policy net with uniform discrete head.
fn linear_policy(state_dim: usize, rng: &mut qdemon::SimRng) -> FeedForwardNet {
    let mut net = FeedForwardNet::new(&[state_dim, 9], rng).unwrap();
    for (i, p) in net.params_mut().iter_mut().enumerate() {
        if i % 9 < 3 {
            *p = 0.0;
        }
    }
    net
}

#[test]
fn flat_critic_gives_no_policy_signal() {
    let mut rng = rng_stream(76, 0);
    let policy = FeedForwardNet::new(&[3, 8, 9], &mut rng).unwrap();
    let critics = flat_critics(3, [0.7, 0.7, 0.7]);
    let states: Vec<f64> = (0..12).map(|_| rng.sample(StandardNormal)).collect();
    let xi: Vec<f64> = (0..12).map(|_| rng.sample(StandardNormal)).collect();
    let cold = TemperaturePair { beta_d: ZERO_TEMP, beta_c: ZERO_TEMP };
    let pl = policy_loss(&states, &critics, &policy, &cold, &xi).unwrap();
    assert!(pl.grad.iter().all(|g| g.abs() < 1e-14));
}

#[test]
fn policy_concentrates_on_the_preferred_action() {
    let mut rng = rng_stream(77, 0);
    let sd = 3;
    let mut policy = linear_policy(sd, &mut rng);
    let critics = flat_critics(sd, [0.0, 2.0, 0.0]);
    let states: Vec<f64> = (0..8 * sd).map(|_| rng.sample(StandardNormal)).collect();
    let temps = TemperaturePair { beta_d: (0.05f64).ln(), beta_c: ZERO_TEMP };
    let mut opt = Adam::new(policy.params().len(), 1e-3);
    let mass = |net: &FeedForwardNet| {
        let s = sample_branches(net, &states, &[0.0; 24]).unwrap();
        (0..8).map(|b| s.probs(b)[1]).sum::<f64>() / 8.0
    };
    let mut prev = mass(&policy);
    for _ in 0..100 {
        let xi: Vec<f64> = (0..24).map(|_| rng.sample(StandardNormal)).collect();
        let pl = policy_loss(&states, &critics, &policy, &temps, &xi).unwrap();
        opt.step(policy.params_mut(), &pl.grad);
        let m = mass(&policy);
        assert!(m > prev, "mass fell from {prev} to {m}");
        prev = m;
    }
    assert!(prev > 0.4);
}

#[test]
fn continuous_head_finds_the_peak_of_the_critic() {
    // Q_d(s, u) = −|u − 0.3| for every d, built from two ReLUs.
    let sd = 3;
    let mut p = vec![0.0; (sd + 1) * 2 + 2 + 2 * 3 + 3];
    p[sd * 2] = 1.0;
    p[sd * 2 + 1] = -1.0;
    p[(sd + 1) * 2] = -0.3;
    p[(sd + 1) * 2 + 1] = 0.3;
    for w in &mut p[(sd + 1) * 2 + 2..(sd + 1) * 2 + 2 + 6] {
        *w = -1.0;
    }
    let net = FeedForwardNet::from_params(&[sd + 1, 2, 3], p).unwrap();
    let critics = CriticPair { q: [net.clone(), net.clone()], target: [net.clone(), net] };
    let mut rng = rng_stream(78, 0);
    let mut policy = linear_policy(sd, &mut rng);
    let states: Vec<f64> = (0..16 * sd).map(|_| rng.sample(StandardNormal)).collect();
    let cold = TemperaturePair { beta_d: ZERO_TEMP, beta_c: ZERO_TEMP };
    let mut opt = Adam::new(policy.params().len(), 1e-2);
    for _ in 0..3000 {
        let xi: Vec<f64> = (0..48).map(|_| rng.sample(StandardNormal)).collect();
        let mut g = policy_loss(&states, &critics, &policy, &cold, &xi).unwrap().grad;
        // Keep the discrete head frozen at uniform.
        for (i, v) in g.iter_mut().enumerate() {
            if i % 9 < 3 {
                *v = 0.0;
            }
        }
        opt.step(policy.params_mut(), &g);
    }
    let s = sample_branches(&policy, &states, &[0.0; 48]).unwrap();
    for b in 0..16 {
        assert!(s.probs(b).iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
        for d in 0..N_DISCRETE {
            let mu = s.params[b].mu[d];
            assert!((mu.tanh() - 0.3).abs() < 0.05, "tanh μ = {}", mu.tanh());
        }
    }
}

#[test]
fn temperature_gradient_signs() {
    let t = TemperaturePair { beta_d: 0.2, beta_c: -0.5 };
    assert_eq!(temperature_gradients(&t, (0.7, -1.0), (0.7, -1.0)), (0.0, 0.0));
    // Entropy above target: positive gradient, α decreases after a descent step.
    let (gd, gc) = temperature_gradients(&t, (1.0, 0.5), (0.5, -1.0));
    assert!(gd > 0.0 && gc > 0.0);
    let after = TemperaturePair { beta_d: t.beta_d - 0.01 * gd, beta_c: t.beta_c - 0.01 * gc };
    assert!(after.alpha_d() < t.alpha_d() && after.alpha_c() < t.alpha_c());
    let (gd, _) = temperature_gradients(&t, (0.2, 0.0), (0.5, 0.0));
    assert!(gd < 0.0);
}

#[test]
fn temperature_tracks_a_step_in_the_entropy_target() {
    let sd = 2;
    let mut rng = rng_stream(79, 0);
    let mut policy = linear_policy(sd, &mut rng);
    let critics = flat_critics(sd, [1.0, 0.5, 0.0]);
    let one: Vec<f64> = (0..sd).map(|_| rng.sample(StandardNormal)).collect();
    let states: Vec<f64> = one.iter().cycle().take(8 * sd).copied().collect();
    let mut temps = TemperaturePair { beta_d: 0.0, beta_c: ZERO_TEMP };
    let mut opt = Adam::new(policy.params().len(), 1e-2);
    let entropy_at = |policy: &FeedForwardNet| sample_branches(policy, &states, &[0.0; 24]).unwrap().discrete_entropy();
    for n in 0..5000 {
        let target = if n < 2500 { 0.9 } else { 0.5 };
        let xi: Vec<f64> = (0..24).map(|_| rng.sample(StandardNormal)).collect();
        let pl = policy_loss(&states, &critics, &policy, &temps, &xi).unwrap();
        opt.step(policy.params_mut(), &pl.grad);
        let (gd, _) = temperature_gradients(&temps, (pl.entropy_d, pl.entropy_c), (target, 0.0));
        temps.beta_d -= 0.05 * gd;
        if n == 2499 {
            let h = entropy_at(&policy);
            assert!((h - 0.9).abs() < 0.05, "entropy {h} before the step");
        }
    }
    let h = entropy_at(&policy);
    assert!((h - 0.5).abs() < 0.05, "entropy {h} after the step");
}

#[test]
fn polyak_averaging() {
    let mut rng = rng_stream(80, 0);
    let live = FeedForwardNet::new(&[3, 4, 2], &mut rng).unwrap();
    let start = FeedForwardNet::new(&[3, 4, 2], &mut rng).unwrap();
    let mut t = start.clone();
    t.polyak_from(&live, 0.0);
    assert_eq!(t, live);
    let mut t = start.clone();
    t.polyak_from(&live, 1.0);
    assert_eq!(t, start);
    let mut t = start.clone();
    for _ in 0..1000 {
        t.polyak_from(&live, 0.995);
    }
    let factor = 0.995f64.powi(1000);
    assert!((factor - 6.65e-3).abs() < 1e-5);
    for ((a, s), l) in t.params().iter().zip(start.params()).zip(live.params()) {
        assert!((a - l - factor * (s - l)).abs() < 1e-12);
    }
}

fn tiny_hyper() -> Hyperparameters {
    Hyperparameters {
        batch_size: 16,
        training_steps: 600,
        buffer_size: 400,
        hidden: vec![8, 8],
        initial_random_steps: 200,
        first_update: 100,
        n_updates: 50,
        // Gentle temperatures: this toy budget is far too short for the
        // default entropy schedule.
        sgd_lr: 3e-4,
        entropy_c: EntropySchedule { start: 0.3, end: -1.0, decay: 2_000.0 },
        ..Hyperparameters::default()
    }
}

fn therm() -> RegimeConfig {
    RegimeConfig::therm_dominated(1.0, 0.02)
}

#[test]
fn targets_change_only_through_polyak_updates() {
    let mut agent = Agent::new(therm(), tiny_hyper(), 3).unwrap();
    agent.train(|_| Ok(())).unwrap();
    let mut rng = rng_stream(81, 0);
    for _ in 0..5 {
        let batch = agent.buffer().sample(16, &mut rng).unwrap();
        let before = agent.critics.clone();
        agent.update_on(&batch).unwrap();
        let mut expected = before.target.clone();
        for (t, q) in expected.iter_mut().zip(&agent.critics.q) {
            t.polyak_from(q, agent.hyper.polyak);
        }
        assert_eq!(agent.critics.target_checksum(), (expected[0].checksum(), expected[1].checksum()));
    }
}

#[test]
fn training_is_reproducible() {
    let run = |seed| {
        let mut h = tiny_hyper();
        h.eval_every = 300;
        let mut agent = Agent::new(therm(), h, seed).unwrap();
        let curve = agent.train(|_| Ok(())).unwrap();
        (curve, agent.policy.net.checksum(), agent.critics.target_checksum(), agent.temps)
    };
    let a = run(11);
    assert_eq!(a, run(11));
    assert_eq!(a.0.len(), 2);
    assert_ne!(a.1, run(12).1);
}

#[test]
fn checkpoint_round_trip_and_version_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("agent.json");
    let mut agent = Agent::new(therm(), tiny_hyper(), 5).unwrap();
    agent.train(|_| Ok(())).unwrap();
    agent.save(&path).unwrap();
    let back = Agent::load(&path).unwrap();
    assert_eq!(back.policy, agent.policy);
    assert_eq!(back.critics, agent.critics);
    assert_eq!(back.temps, agent.temps);
    assert_eq!(back.steps_done(), 600);
    assert_eq!(back.buffer().cursor(), agent.buffer().cursor());
    assert!(back.buffer().is_empty());
    assert_eq!(back.evaluate(10_000, 9).unwrap(), agent.evaluate(10_000, 9).unwrap());

    let text = std::fs::read_to_string(&path).unwrap();
    let mut raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    raw["version"] = serde_json::json!(99);
    std::fs::write(&path, raw.to_string()).unwrap();
    assert!(matches!(Agent::load(&path), Err(Error::CheckpointVersion { found: 99, .. })));
}

#[test]
fn hyperparameter_validation() {
    assert!(Hyperparameters::default().validate().is_ok());
    let h = Hyperparameters::default();
    assert!((h.horizon() - 500.0).abs() < 1.0);
    let bad = [
        Hyperparameters { batch_size: 0, ..h.clone() },
        Hyperparameters { gamma: 1.0, ..h.clone() },
        Hyperparameters { polyak: 1.5, ..h.clone() },
        Hyperparameters { hidden: vec![], ..h.clone() },
        Hyperparameters { first_update: 10, ..h.clone() },
        Hyperparameters { reward_scale: 0.0, ..h.clone() },
    ];
    for b in bad {
        assert!(b.validate().is_err(), "{b:?}");
    }
}

#[test]
fn replay_buffer_is_fifo() {
    let mut buf = ReplayBuffer::new(5, 2).unwrap();
    for k in 0..8 {
        let s = [k as f64, 0.0];
        buf.push(&s, k % 3, 0.1, k as f64, &s).unwrap();
    }
    assert_eq!(buf.len(), 5);
    assert_eq!(buf.cursor(), 3);
    let rewards: Vec<f64> = (0..5).map(|k| buf.get(k).unwrap().3).collect();
    assert_eq!(rewards, vec![3.0, 4.0, 5.0, 6.0, 7.0]);
    assert!(buf.get(5).is_none());
    let mut rng = rng_stream(82, 0);
    let b = buf.sample(5, &mut rng).unwrap();
    let mut r = b.rewards.clone();
    r.sort_by(f64::total_cmp);
    assert_eq!(r, rewards, "sampling is without replacement");
    assert!(buf.sample(6, &mut rng).is_err());
    assert!(buf.push(&[0.0], 0, 0.0, 0.0, &[0.0, 0.0]).is_err());
}

#[test]
fn policy_head_sampling() {
    let mut rng = rng_stream(83, 0);
    let sd = 2;
    let head_with = |mu: f64, m: f64| {
        let mut p = vec![0.0; sd * 9 + 9];
        for d in 0..3 {
            p[sd * 9 + 3 + d] = mu;
            p[sd * 9 + 6 + d] = m;
        }
        PolicyHead { net: FeedForwardNet::from_params(&[sd, 9], p).unwrap(), u_low: -0.8, u_high: 0.8 }
    };
    // σ → 0: the control is the squashed mean.
    let h = head_with(0.4, 0.0);
    for _ in 0..100 {
        let s = h.sample(&[0.3, -0.2], &mut rng, false).unwrap();
        assert!((s.u - (-0.8 + 1.6 * (1.0 + 0.4f64.tanh()) / 2.0)).abs() < 1e-3);
    }
    // μ = 0: the control is symmetric about the midpoint (sign test at 1%).
    let h = head_with(0.0, 1.0);
    let n = 100_000;
    let pos = (0..n).filter(|_| h.sample(&[0.3, -0.2], &mut rng, false).unwrap().u > 0.0).count() as f64;
    assert!((pos - n as f64 / 2.0).abs() < 2.576 * (n as f64).sqrt() / 2.0, "{pos} positive");
}

/// Density of u = u_a + w(1 + tanh z), z ~ N(μ, σ²), by change of variables.
fn squashed_density(u: f64, mu: f64, sigma: f64, ua: f64, w: f64) -> f64 {
    let t = (u - ua) / w - 1.0;
    let z = t.atanh();
    let gauss = (-(z - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    gauss / (1.0 - t * t) / w
}

#[test]
fn continuous_log_density() {
    let mut rng = rng_stream(84, 0);
    let (ua, ub) = (-0.8, 0.8);
    for _ in 0..10 {
        let mut head = PolicyHead::new(3, &[6], ua, ub, &mut rng).unwrap();
        // Shift the output biases so (μ, σ) vary across trials.
        let n = head.net.params().len();
        let mu0: f64 = rng.random_range(-1.0..1.0);
        let m0: f64 = rng.random_range(0.2..1.2);
        for d in 0..3 {
            head.net.params_mut()[n - 6 + d] = mu0;
            head.net.params_mut()[n - 3 + d] = m0;
        }
        let state = [0.1, -0.4, 0.7];
        let p = head.params(&state).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-7);
        for _ in 0..50 {
            let s = head.sample(&state, &mut rng, false).unwrap();
            let oracle = squashed_density(s.u, p.mu[s.discrete], p.sigma(s.discrete), ua, head.half_width()).ln();
            assert!((s.log_pi_c - oracle).abs() < 1e-8, "{} vs {oracle}", s.log_pi_c);
            assert!((s.log_pi_d - p.log_probs[s.discrete]).abs() < 1e-15);
        }
        // The library log-density integrates to one over the action range.
        let (mu, sigma, w) = (p.mu[0], p.sigma(0), head.half_width());
        let k = 200_000;
        let du = (ub - ua) / k as f64;
        let total: f64 = (0..k)
            .map(|i| {
                let u = ua + (i as f64 + 0.5) * du;
                let z = ((u - ua) / w - 1.0).atanh();
                let lp = qdemon::sac::squashed_log_prob(sigma, (z - mu) / sigma, z) - w.ln();
                lp.exp() * du
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-3, "μ {mu} σ {sigma}: {total}");
    }
}

proptest! {
    #[test]
    fn softmax_head_normalizes(seed in 0u64..10_000, s0 in -5.0..5.0f64, s1 in -5.0..5.0f64) {
        let mut rng = rng_stream(seed, 2);
        let head = PolicyHead::new(2, &[8], -1.0, 1.0, &mut rng).unwrap();
        let p = head.params(&[s0, s1]).unwrap();
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-7);
        prop_assert!((0..3).all(|d| p.sigma(d) > 0.0));
    }

    #[test]
    fn entropy_schedule_is_monotone(start in -2.0..2.0f64, drop in 0.0..4.0f64, decay in 1.0..1e5f64, n in 0u64..1_000_000) {
        let s = EntropySchedule { start, end: start - drop, decay };
        prop_assert!(s.value(n + 1) <= s.value(n));
        prop_assert!(s.value(n) >= s.end - 1e-12 && s.value(n) <= s.start + 1e-12);
    }

    #[test]
    fn replay_buffer_keeps_the_newest(cap in 1usize..20, n in 0usize..60) {
        let mut buf = ReplayBuffer::new(cap, 1).unwrap();
        for k in 0..n {
            buf.push(&[0.0], 0, 0.0, k as f64, &[0.0]).unwrap();
        }
        let len = n.min(cap);
        prop_assert_eq!(buf.len(), len);
        for k in 0..len {
            prop_assert_eq!(buf.get(k).unwrap().3, (n - len + k) as f64);
        }
    }
}
