//! Experiment orchestration behind the `qdemon` command line: named presets,
//! training runs, c-sweeps, baseline fronts and trajectory dumps.

mod commands;
pub mod io;
mod pareto;
mod preset;

pub use commands::{
    cmd_baseline, cmd_eval, cmd_sweep, cmd_trace, cmd_train, read_curve, EvalReport, TrainArtifacts, EVAL_STEPS,
};
pub use pareto::{best_per_c, front_inversions, ParetoPoint, PointSource};
pub use preset::{preset_names, ExperimentPreset};
