#ifndef REPLITRAP_H
#define REPLITRAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Relative position of two saddles.
 */
typedef enum {
  RT_CONFIGURATION_LEFT_RIGHT = 0,
  RT_CONFIGURATION_UP_DOWN = 1,
  RT_CONFIGURATION_SHARED_STABLE_MANIFOLD = 2,
  RT_CONFIGURATION_SHARED_UNSTABLE_MANIFOLD = 3,
  RT_CONFIGURATION_MIXED = 4,
} RtConfiguration;

/**
 * Result code of every fallible call.
 */
typedef enum {
  RT_STATUS_OK = 0,
  RT_STATUS_NULL_POINTER = 1,
  RT_STATUS_DOMAIN = 2,
  RT_STATUS_PRECONDITION = 3,
  RT_STATUS_INTEGRATION = 4,
  RT_STATUS_TIMEOUT = 5,
  RT_STATUS_GEOMETRY = 6,
  RT_STATUS_CONFIG = 7,
  RT_STATUS_OUT_OF_RANGE = 8,
  RT_STATUS_PANIC = 9,
} RtStatus;

/**
 * Opaque bimatrix game.
 */
typedef struct RtGame RtGame;

/**
 * Opaque planar trajectory.
 */
typedef struct RtTrajectory RtTrajectory;

/**
 * Environment identifier: 0 for environment I, 1 for environment II.
 */
typedef uint8_t RtEnv;

/**
 * One phase of a switching schedule.
 */
typedef struct {
  RtEnv env;
  double duration;
} RtPhase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rt_last_error_message(void);

/**
 * Creates a game from row-major payoff matrices `a` and `b` (4 entries
 * each: `x11, x12, x21, x22`).
 *
 * # Safety
 * `a` and `b` must point to 4 readable doubles; `out` must be writable.
 */
RtStatus rt_game_new(const double *a, const double *b, RtGame **out);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must come from [`rt_game_new`] and not be used afterwards.
 */
void rt_game_free(RtGame *game);

/**
 * Velocity of the replicator system at `(x, y)`.
 *
 * # Safety
 * `game` must be a live handle; `dx` and `dy` must be writable.
 */
RtStatus rt_game_rhs(const RtGame *game, double x, double y, double *dx, double *dy);

/**
 * Interior fixed point. `exists` is set to 0 when there is none, in which
 * case `x` and `y` are left untouched.
 *
 * # Safety
 * `game` must be a live handle; the out pointers must be writable.
 */
RtStatus rt_game_fixed_point(const RtGame *game, int32_t *exists, double *x, double *y);

/**
 * Value of the constant of motion at an interior point.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
RtStatus rt_constant_of_motion(const RtGame *game, double x, double y, double *out);

/**
 * Closed-form dwell times of the scalar pair `(a1, b1)`, `(a2, b2)` with
 * window offsets `eps` and `delta`.
 *
 * # Safety
 * `t_left` and `t_right` must be writable.
 */
RtStatus rt_switch_times(double a1,
                         double b1,
                         double a2,
                         double b2,
                         double eps,
                         double delta,
                         double *t_left,
                         double *t_right);

/**
 * Dwell time of the symmetric pair for window offset `eps`.
 *
 * # Safety
 * `out` must be writable.
 */
RtStatus rt_symmetric_period(double eps, double *out);

/**
 * Integrates the switched system over `[0, t_end]` following `phases`.
 * A `step` of 0 selects the default step.
 *
 * # Safety
 * `env_i` and `env_ii` must be live handles; `phases` must point to
 * `n_phases` entries; `out` must be writable.
 */
RtStatus rt_integrate_switched(const RtGame *env_i,
                               const RtGame *env_ii,
                               const RtPhase *phases,
                               size_t n_phases,
                               bool repeat,
                               double x0,
                               double y0,
                               double t_end,
                               double step,
                               RtTrajectory **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t rt_trajectory_len(const RtTrajectory *traj);

/**
 * Number of environment switches; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t rt_trajectory_switch_count(const RtTrajectory *traj);

/**
 * Sample `index` as time, state and environment.
 *
 * # Safety
 * `traj` must be a live handle; the out pointers must be writable.
 */
RtStatus rt_trajectory_sample(const RtTrajectory *traj,
                              size_t index,
                              double *t,
                              double *x,
                              double *y,
                              RtEnv *env);

/**
 * The trajectory as CSV text. Release with [`rt_string_free`].
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
RtStatus rt_trajectory_csv(const RtTrajectory *traj, char **out);

/**
 * Releases a trajectory. Null is ignored.
 *
 * # Safety
 * `traj` must come from this library and not be used afterwards.
 */
void rt_trajectory_free(RtTrajectory *traj);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rt_string_free(char *s);

/**
 * Classifies the interior saddles of two games.
 *
 * # Safety
 * `first` and `second` must be live handles; `out` must be writable.
 */
RtStatus rt_classify_pair(const RtGame *first, const RtGame *second, RtConfiguration *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REPLITRAP_H */
