#ifndef QDEMON_H
#define QDEMON_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  QD_STATUS_OK = 0,
  QD_STATUS_NULL_POINTER = 1,
  QD_STATUS_INVALID_ARGUMENT = 2,
  QD_STATUS_INVALID_ACTION = 3,
  QD_STATUS_UNKNOWN_PRESET = 4,
  QD_STATUS_IO = 5,
  QD_STATUS_PARSE = 6,
  QD_STATUS_NON_FINITE = 7,
  QD_STATUS_BUFFER_TOO_SMALL = 8,
  QD_STATUS_UNSUPPORTED = 9,
  QD_STATUS_PANIC = 10,
} QdStatus;

/**
 * A trained agent loaded from a checkpoint.
 */
typedef struct QdAgent QdAgent;

/**
 * An environment together with its current state and random stream.
 */
typedef struct QdEnv QdEnv;

/**
 * Result of one environment step.
 */
typedef struct {
  double reward;
  double heat;
  double dissipation;
  bool measured;
} QdStepResult;

/**
 * Long-run averages of a policy evaluation.
 */
typedef struct {
  double avg_power;
  double avg_dissipation;
  /**
   * ⟨P⟩/⟨D⟩, NaN when nothing was dissipated.
   */
  double efficiency;
  uint64_t steps;
  /**
   * Counts of Unitary, Thermalize and Measure actions.
   */
  uint64_t action_counts[3];
  uint64_t measurement_runs;
} QdMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qd_version(void);

/**
 * Create an environment for a bundled preset at trade-off weight `c`.
 *
 * # Safety
 * `preset` must be a NUL-terminated string and `out` a valid pointer.
 */
QdStatus qd_env_new(const char *preset, double c, uint64_t seed, QdEnv **out);

/**
 * # Safety
 * `env` must come from this library and not be used afterwards; NULL is ignored.
 */
void qd_env_free(QdEnv *env);

/**
 * Return to the initial Gibbs state and restart the random stream.
 *
 * # Safety
 * `env` must be a live handle.
 */
QdStatus qd_env_reset(QdEnv *env);

/**
 * Length of the state encoding: 9 for one qubit, 33 for two.
 *
 * # Safety
 * `env` must be a live handle or NULL (which yields 0).
 */
size_t qd_env_state_dim(const QdEnv *env);

/**
 * Write the allowed control range.
 *
 * # Safety
 * All pointers must be valid.
 */
QdStatus qd_env_control_range(const QdEnv *env, double *lo, double *hi);

/**
 * Copy the current state encoding (Re ρ, Im ρ row-major, then the last
 * control) into `buf`, which must hold `qd_env_state_dim` values.
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
QdStatus qd_env_observe(const QdEnv *env, double *buf, size_t len);

/**
 * Apply action (`discrete`, `u`) with discrete 0 = Unitary, 1 = Thermalize,
 * 2 = Measure. `out` may be NULL.
 *
 * # Safety
 * `env` must be a live handle; `out` must be valid or NULL.
 */
QdStatus qd_env_step(QdEnv *env, uint32_t discrete, double u, QdStepResult *out);

/**
 * Load a checkpoint written by `qdemon train`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
QdStatus qd_agent_load(const char *path, QdAgent **out);

/**
 * # Safety
 * `agent` must come from this library and not be used afterwards; NULL is ignored.
 */
void qd_agent_free(QdAgent *agent);

/**
 * Create an environment with the configuration the agent was trained on.
 *
 * # Safety
 * `agent` must be a live handle and `out` a valid pointer.
 */
QdStatus qd_agent_env(const QdAgent *agent, uint64_t seed, QdEnv **out);

/**
 * Choose an action for the environment's current state. Deterministic mode
 * takes the most likely discrete action and the squashed mean control.
 *
 * # Safety
 * Handles must be live; `discrete` and `u` must be valid pointers.
 */
QdStatus qd_agent_act(QdAgent *agent,
                      const QdEnv *env,
                      bool deterministic,
                      uint32_t *discrete,
                      double *u);

/**
 * Evaluate the agent in deterministic mode over `n_steps` (at least 10 000)
 * with a 10% burn-in.
 *
 * # Safety
 * `agent` must be a live handle and `out` a valid pointer.
 */
QdStatus qd_agent_evaluate(const QdAgent *agent, uint64_t n_steps, QdMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDEMON_H */
