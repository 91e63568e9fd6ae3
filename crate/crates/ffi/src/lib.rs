//! C ABI for the qdemon simulator and trained agents.
//!
//! Environments and agents are opaque heap handles created by `qd_*_new` or
//! `qd_*_load` and released with the matching `qd_*_free`. Every fallible call
//! returns a [`QdStatus`]; on failure a description is available from
//! [`qd_last_error_message`] on the same thread until the next failing call.
//! Panics never cross the boundary and are reported as `QD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qdemon::env::{encode_into, DiscreteAction, EnvState, Environment, HybridAction, Policy, PolicyMetrics};
use qdemon::harness::ExperimentPreset;
use qdemon::sac::{Agent, AgentPolicy};
use qdemon::{rng_stream, Error, SimRng};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidAction = 3,
    UnknownPreset = 4,
    Io = 5,
    Parse = 6,
    NonFinite = 7,
    BufferTooSmall = 8,
    Unsupported = 9,
    Panic = 10,
}

/// Result of one environment step.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QdStepResult {
    pub reward: f64,
    pub heat: f64,
    pub dissipation: f64,
    pub measured: bool,
}

/// Long-run averages of a policy evaluation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QdMetrics {
    pub avg_power: f64,
    pub avg_dissipation: f64,
    /// ⟨P⟩/⟨D⟩, NaN when nothing was dissipated.
    pub efficiency: f64,
    pub steps: u64,
    /// Counts of Unitary, Thermalize and Measure actions.
    pub action_counts: [u64; 3],
    pub measurement_runs: u64,
}

impl From<&PolicyMetrics> for QdMetrics {
    fn from(m: &PolicyMetrics) -> Self {
        QdMetrics {
            avg_power: m.avg_power,
            avg_dissipation: m.avg_dissipation,
            efficiency: m.efficiency.unwrap_or(f64::NAN),
            steps: m.steps as u64,
            action_counts: m.action_counts,
            measurement_runs: m.measurement_runs,
        }
    }
}

/// An environment together with its current state and random stream.
pub struct QdEnv {
    env: Environment,
    state: EnvState,
    rng: SimRng,
    seed: u64,
}

/// A trained agent loaded from a checkpoint.
pub struct QdAgent {
    agent: Agent,
    rng: SimRng,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QdStatus {
    match e {
        Error::InvalidAction(_) => QdStatus::InvalidAction,
        Error::UnknownPreset(_) => QdStatus::UnknownPreset,
        Error::Io(_) => QdStatus::Io,
        Error::Json(_) | Error::Csv(_) | Error::CheckpointVersion { .. } => QdStatus::Parse,
        Error::NonFinite(_) => QdStatus::NonFinite,
        Error::UnsupportedRegime(_) | Error::OutOfScope(_) => QdStatus::Unsupported,
        _ => QdStatus::InvalidArgument,
    }
}

/// Failure inside the boundary: a status plus its message.
struct Fail(QdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QdStatus::NullPointer, format!("{what} is NULL"))
}

/// Run `f`, translating errors and panics into a status and the last-error slot.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            QdStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(QdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create an environment for a bundled preset at trade-off weight `c`.
///
/// # Safety
/// `preset` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_env_new(preset: *const c_char, c: f64, seed: u64, out: *mut *mut QdEnv) -> QdStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let preset = ExperimentPreset::load(str_arg(preset, "preset")?)?;
        let env = Environment::new(preset.config_for(c)?)?;
        *out = Box::into_raw(Box::new(new_env(env, seed)?));
        Ok(())
    })
}

fn new_env(env: Environment, seed: u64) -> Result<QdEnv, Fail> {
    let mut rng = rng_stream(seed, 0);
    let state = env.reset(&mut rng)?;
    Ok(QdEnv { env, state, rng, seed })
}

/// # Safety
/// `env` must come from this library and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qd_env_free(env: *mut QdEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Return to the initial Gibbs state and restart the random stream.
///
/// # Safety
/// `env` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_env_reset(env: *mut QdEnv) -> QdStatus {
    guard(|| {
        let e = mut_arg(env, "env")?;
        e.rng = rng_stream(e.seed, 0);
        e.state = e.env.reset(&mut e.rng)?;
        Ok(())
    })
}

/// Length of the state encoding: 9 for one qubit, 33 for two.
///
/// # Safety
/// `env` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qd_env_state_dim(env: *const QdEnv) -> usize {
    env.as_ref().map_or(0, |e| e.env.config().regime.state_dim())
}

/// Write the allowed control range.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_env_control_range(env: *const QdEnv, lo: *mut f64, hi: *mut f64) -> QdStatus {
    guard(|| {
        let e = env.as_ref().ok_or_else(|| null("env"))?;
        *mut_arg(lo, "lo")? = e.env.config().u_min;
        *mut_arg(hi, "hi")? = e.env.config().u_max;
        Ok(())
    })
}

/// Copy the current state encoding (Re ρ, Im ρ row-major, then the last
/// control) into `buf`, which must hold `qd_env_state_dim` values.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qd_env_observe(env: *const QdEnv, buf: *mut f64, len: usize) -> QdStatus {
    guard(|| {
        let e = env.as_ref().ok_or_else(|| null("env"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let mut v = Vec::new();
        encode_into(&e.state, &mut v);
        if len < v.len() {
            return Err(Fail(QdStatus::BufferTooSmall, format!("need {} values, got {len}", v.len())));
        }
        std::slice::from_raw_parts_mut(buf, v.len()).copy_from_slice(&v);
        Ok(())
    })
}

/// Apply action (`discrete`, `u`) with discrete 0 = Unitary, 1 = Thermalize,
/// 2 = Measure. `out` may be NULL.
///
/// # Safety
/// `env` must be a live handle; `out` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn qd_env_step(env: *mut QdEnv, discrete: u32, u: f64, out: *mut QdStepResult) -> QdStatus {
    guard(|| {
        let e = mut_arg(env, "env")?;
        let d = DiscreteAction::from_index(discrete as usize)
            .map_err(|_| Fail(QdStatus::InvalidAction, format!("discrete action {discrete} is not 0, 1 or 2")))?;
        let o = e.env.step(&e.state, HybridAction::new(d, u), &mut e.rng)?;
        e.state = o.next;
        if let Some(r) = out.as_mut() {
            *r = QdStepResult { reward: o.reward, heat: o.heat, dissipation: o.dissipation, measured: o.measured };
        }
        Ok(())
    })
}

/// Load a checkpoint written by `qdemon train`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_agent_load(path: *const c_char, out: *mut *mut QdAgent) -> QdStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let agent = Agent::load(Path::new(str_arg(path, "path")?))?;
        let rng = rng_stream(agent.seed, 2);
        *out = Box::into_raw(Box::new(QdAgent { agent, rng }));
        Ok(())
    })
}

/// # Safety
/// `agent` must come from this library and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qd_agent_free(agent: *mut QdAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Create an environment with the configuration the agent was trained on.
///
/// # Safety
/// `agent` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_agent_env(agent: *const QdAgent, seed: u64, out: *mut *mut QdEnv) -> QdStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let a = agent.as_ref().ok_or_else(|| null("agent"))?;
        let env = Environment::new(a.agent.config.clone())?;
        *out = Box::into_raw(Box::new(new_env(env, seed)?));
        Ok(())
    })
}

/// Choose an action for the environment's current state. Deterministic mode
/// takes the most likely discrete action and the squashed mean control.
///
/// # Safety
/// Handles must be live; `discrete` and `u` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qd_agent_act(
    agent: *mut QdAgent,
    env: *const QdEnv,
    deterministic: bool,
    discrete: *mut u32,
    u: *mut f64,
) -> QdStatus {
    guard(|| {
        let a = mut_arg(agent, "agent")?;
        let e = env.as_ref().ok_or_else(|| null("env"))?;
        let (discrete, u) = (mut_arg(discrete, "discrete")?, mut_arg(u, "u")?);
        if e.env.config().regime.state_dim() != a.agent.config.regime.state_dim() {
            return Err(Fail(QdStatus::InvalidArgument, "environment and agent have different state sizes".into()));
        }
        let action = AgentPolicy::new(&a.agent.policy, deterministic).act(&e.state, &mut a.rng)?;
        *discrete = action.discrete.index() as u32;
        *u = action.continuous;
        Ok(())
    })
}

/// Evaluate the agent in deterministic mode over `n_steps` (at least 10 000)
/// with a 10% burn-in.
///
/// # Safety
/// `agent` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_agent_evaluate(agent: *const QdAgent, n_steps: u64, out: *mut QdMetrics) -> QdStatus {
    guard(|| {
        let a = agent.as_ref().ok_or_else(|| null("agent"))?;
        let out = mut_arg(out, "out")?;
        let m = a.agent.evaluate(n_steps as usize, 1 << 32)?;
        *out = QdMetrics::from(&m);
        Ok(())
    })
}
