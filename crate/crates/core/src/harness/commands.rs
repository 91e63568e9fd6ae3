use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::io::{write_atomic, write_csv, write_jsonl};
use super::pareto::{best_per_c, ParetoPoint, PointSource};
use super::preset::ExperimentPreset;
use crate::baselines::{
    default_purity_threshold, optimize_measure_flip_thermalize, optimize_swap_policy, run_adaptive_perpendicular,
    AdaptivePerpendicularPolicy, MftGrid, SwapGrid,
};
use crate::env::{rollout, Environment, PolicyMetrics, Regime, TraceRecord};
use crate::sac::{Agent, AgentPolicy, CurveRow};
use crate::{rng_stream, Error, Result};

/// Random stream for the final evaluation of a trained agent.
const FINAL_EVAL_STREAM: u64 = 1 << 32;
/// Random stream for trajectory dumps.
const TRACE_STREAM: u64 = (1 << 32) + 1;
/// Default length of final evaluations and baseline Monte Carlo runs.
pub const EVAL_STEPS: usize = 20_000;

#[derive(Clone, Debug)]
pub struct TrainArtifacts {
    pub checkpoint: PathBuf,
    pub curve: PathBuf,
    pub metrics: PolicyMetrics,
}

fn run_stem(preset: &ExperimentPreset, c: f64, seed: u64) -> String {
    format!("{}_c{c:.3}_s{seed}", preset.name)
}

/// Train one agent and write its checkpoint and learning curve.
pub fn cmd_train(
    preset: &ExperimentPreset,
    c: f64,
    seed: u64,
    steps: Option<u64>,
    out_dir: &Path,
) -> Result<TrainArtifacts> {
    let config = preset.config_for(c)?;
    let mut hyper = preset.hyper.clone();
    hyper.training_steps = steps.unwrap_or_else(|| preset.steps_for(c));
    if hyper.eval_every == 0 {
        hyper.eval_every = (hyper.training_steps / 8).max(1);
    }
    let stem = run_stem(preset, c, seed);
    let checkpoint = out_dir.join(format!("{stem}.ckpt.json"));
    let curve_path = out_dir.join(format!("{stem}_curve.csv"));

    let mut agent = Agent::new(config, hyper, seed)?;
    let curve = match agent.train(|_| Ok(())) {
        Ok(rows) => rows,
        Err(Error::NonFinite(msg)) => {
            let dump = out_dir.join(format!("{stem}.diverged.json"));
            agent.save(&dump)?;
            return Err(Error::NonFinite(format!("{msg}; diagnostic dump written to {}", dump.display())));
        }
        Err(e) => return Err(e),
    };
    write_csv(&curve_path, &curve_comments(preset, c, seed), &curve)?;
    agent.save(&checkpoint)?;
    let metrics = agent.evaluate(EVAL_STEPS, FINAL_EVAL_STREAM)?;
    Ok(TrainArtifacts { checkpoint, curve: curve_path, metrics })
}

fn curve_comments(preset: &ExperimentPreset, c: f64, seed: u64) -> Vec<(&'static str, String)> {
    vec![
        ("preset", preset.name.clone()),
        ("c", c.to_string()),
        ("seed", seed.to_string()),
        ("budget_scale", preset.budget_scale.to_string()),
    ]
}

/// Run `jobs` on up to `workers` threads; results keep job order.
fn run_parallel<J: Sync, R: Send>(jobs: &[J], workers: usize, f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                results.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    results.into_inner().expect("workers finished").into_iter().map(|r| r.expect("every job ran")).collect()
}

/// Train every (c, seed) pair, keep the best seed per c and write the front.
pub fn cmd_sweep(
    preset: &ExperimentPreset,
    steps: Option<u64>,
    workers: usize,
    out_dir: &Path,
) -> Result<Vec<ParetoPoint>> {
    let jobs: Vec<(f64, u64)> =
        preset.c_values.iter().flat_map(|&c| preset.seeds.iter().map(move |&s| (c, s))).collect();
    let points = run_parallel(&jobs, workers, |&(c, seed)| match cmd_train(preset, c, seed, steps, out_dir) {
        Ok(a) => ParetoPoint::from_metrics(c, &a.metrics, PointSource::Rl, Some(seed), "sac".into()),
        Err(e) => ParetoPoint::failed(c, PointSource::Rl, Some(seed), e.to_string()),
    });
    let front = best_per_c(&points);
    let path = out_dir.join(format!("{}_pareto.csv", preset.name));
    write_csv(&path, &[("preset", preset.name.clone()), ("budget_scale", preset.budget_scale.to_string())], &front)?;
    Ok(front)
}

/// Grid-optimize the interpretable policy of the preset's regime for every c.
pub fn cmd_baseline(preset: &ExperimentPreset, n_steps: usize, out_dir: &Path) -> Result<Vec<ParetoPoint>> {
    let mut points = Vec::with_capacity(preset.c_values.len());
    for &c in &preset.c_values {
        let config = preset.config_for(c)?;
        let point = match config.regime {
            Regime::ThermDominated => {
                let best = optimize_measure_flip_thermalize(&config, &MftGrid::default_for(&config))?;
                let p = &best.policy;
                let desc = format!("measure-flip-thermalize u_bar={} tau_bar={}", p.u_bar, p.tau_bar(config.dt));
                ParetoPoint::from_metrics(c, &best.metrics, PointSource::Baseline, None, desc)
            }
            Regime::TwoQubit => {
                let seed = preset.seeds[0];
                let best = optimize_swap_policy(&config, &SwapGrid::default_for(&config), n_steps, seed)?;
                let p = &best.policy;
                let desc = format!(
                    "swap u_bar={} tau_bar={} swap_steps={}",
                    p.u_bar,
                    p.tau_steps as f64 * config.dt,
                    p.swap_steps
                );
                ParetoPoint::from_metrics(c, &best.metrics, PointSource::Baseline, Some(seed), desc)
            }
            Regime::MeasDiscreteAdaptive => {
                let seed = preset.seeds[0];
                let p = AdaptivePerpendicularPolicy::new(0.0, default_purity_threshold(&config)?)?;
                let m = run_adaptive_perpendicular(&p, &config, n_steps, &mut rng_stream(seed, 0))?;
                let desc = format!("adaptive-perpendicular threshold={}", p.purity_threshold);
                ParetoPoint::from_metrics(c, &m, PointSource::Baseline, Some(seed), desc)
            }
            r => return Err(Error::UnsupportedRegime(format!("no interpretable baseline for {}", r.name()))),
        };
        points.push(point);
    }
    points.sort_by(|a, b| b.c.total_cmp(&a.c));
    let path = out_dir.join(format!("{}_baseline.csv", preset.name));
    write_csv(&path, &[("preset", preset.name.clone()), ("budget_scale", preset.budget_scale.to_string())], &points)?;
    Ok(points)
}

/// Roll out a checkpointed policy in deterministic mode and log every step.
pub fn cmd_trace(checkpoint: &Path, n_steps: usize, out_file: &Path) -> Result<Vec<TraceRecord>> {
    let agent = Agent::load(checkpoint)?;
    let mut env = Environment::new(agent.config.clone())?;
    let mut policy = AgentPolicy::new(&agent.policy, true);
    let mut rng = rng_stream(agent.seed, TRACE_STREAM);
    let mut records = Vec::with_capacity(n_steps);
    rollout(&mut env, &mut policy, n_steps, &mut rng, |prev, action, out| {
        records.push(TraceRecord::new(prev, action, out)?);
        Ok(())
    })?;
    write_jsonl(out_file, &records)?;
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub c: f64,
    pub regime: Regime,
    pub metrics: PolicyMetrics,
    pub figure_of_merit: f64,
    pub mean_measurement_run: f64,
}

/// Evaluate a checkpoint; optionally write the report as JSON.
pub fn cmd_eval(checkpoint: &Path, n_steps: usize, out_file: Option<&Path>) -> Result<EvalReport> {
    let agent = Agent::load(checkpoint)?;
    let metrics = agent.evaluate(n_steps, FINAL_EVAL_STREAM)?;
    let report = EvalReport {
        c: agent.config.c,
        regime: agent.config.regime,
        figure_of_merit: metrics.figure_of_merit(agent.config.c),
        mean_measurement_run: metrics.mean_measurement_run(),
        metrics,
    };
    if let Some(path) = out_file {
        write_atomic(path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    Ok(report)
}

/// Learning-curve rows of a previous `train` run.
pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    super::io::read_csv(path)
}
