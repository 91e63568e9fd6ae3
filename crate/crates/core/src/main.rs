use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdemon::harness::{
    cmd_baseline, cmd_eval, cmd_sweep, cmd_trace, cmd_train, preset_names, ExperimentPreset, EVAL_STEPS,
};
use qdemon::Error;

/// Reinforcement-learning Maxwell's demon experiments.
#[derive(Parser)]
#[command(name = "qdemon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent and write a checkpoint plus learning curve.
    Train {
        /// Bundled preset name, e.g. fig3.
        #[arg(long)]
        preset: String,
        /// Trade-off weight c in [0, 1] between power and measurement cost.
        #[arg(long)]
        c: f64,
        /// Seed of every random stream in the run.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Override the preset's training steps.
        #[arg(long)]
        steps: Option<u64>,
        /// Override the preset's measurement strength κ.
        #[arg(long)]
        kappa: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Train every (c, seed) of a preset and write the best-of-seeds front.
    Sweep {
        /// Bundled preset name, e.g. fig3.
        #[arg(long)]
        preset: String,
        /// Override the preset's training steps.
        #[arg(long)]
        steps: Option<u64>,
        /// Training runs in parallel.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Override the preset's measurement strength κ.
        #[arg(long)]
        kappa: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Optimize the interpretable baseline of a preset for every c.
    Baseline {
        /// Bundled preset name, e.g. fig3.
        #[arg(long)]
        preset: String,
        /// Monte Carlo steps per grid point where the baseline is sampled.
        #[arg(long, default_value_t = EVAL_STEPS as u64)]
        steps: u64,
        /// Override the preset's measurement strength κ.
        #[arg(long)]
        kappa: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Dump a deterministic trajectory of a trained agent as JSON lines.
    Trace {
        /// Checkpoint written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        /// JSON-lines output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a trained agent and print its long-run averages.
    Eval {
        /// Checkpoint written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = EVAL_STEPS as u64)]
        steps: u64,
        /// Also write the report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_preset(name: &str, kappa: Option<f64>) -> qdemon::Result<ExperimentPreset> {
    let mut p = ExperimentPreset::load(name)?;
    if kappa.is_some() {
        p.kappa = kappa;
        p.validate()?;
    }
    Ok(p)
}

fn run(cli: Cli) -> qdemon::Result<()> {
    match cli.command {
        Command::Train { preset, c, seed, steps, kappa, out } => {
            let p = load_preset(&preset, kappa)?;
            let a = cmd_train(&p, c, seed, steps, &out)?;
            println!("checkpoint: {}", a.checkpoint.display());
            println!("learning curve: {}", a.curve.display());
            println!("{}", serde_json::to_string(&a.metrics)?);
        }
        Command::Sweep { preset, steps, workers, kappa, out } => {
            let p = load_preset(&preset, kappa)?;
            for pt in cmd_sweep(&p, steps, workers, &out)? {
                if pt.is_ok() {
                    println!("c={} P={:.6} D={:.6} seed={:?}", pt.c, pt.avg_power, pt.avg_dissipation, pt.seed);
                } else {
                    println!("c={} failed: {}", pt.c, pt.error);
                }
            }
        }
        Command::Baseline { preset, steps, kappa, out } => {
            let p = load_preset(&preset, kappa)?;
            for pt in cmd_baseline(&p, steps as usize, &out)? {
                println!("c={} P={:.6} D={:.6} {}", pt.c, pt.avg_power, pt.avg_dissipation, pt.policy);
            }
        }
        Command::Trace { checkpoint, steps, out } => {
            let records = cmd_trace(&checkpoint, steps as usize, &out)?;
            println!("wrote {} records to {}", records.len(), out.display());
        }
        Command::Eval { checkpoint, steps, out } => {
            let report = cmd_eval(&checkpoint, steps as usize, out.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::UnknownPreset(_)) => {
            eprintln!("error: {e}");
            eprintln!("available presets: {}", preset_names().join(", "));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
