#ifndef DQC_H
#define DQC_H

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum DqStatus {
  DQ_STATUS_OK = 0,
  DQ_STATUS_NULL_POINTER = 1,
  DQ_STATUS_INVALID_ARGUMENT = 2,
  DQ_STATUS_CONFIG_ERROR = 3,
  DQ_STATUS_PHYSICS_ERROR = 4,
  DQ_STATUS_CHECK_FAILED = 5,
  DQ_STATUS_PANIC = 6,
} DqStatus;

// Two-level model with its Liouvillian, in the lab or rotating frame.
typedef struct DqModel DqModel;

// Sampled trajectory.
typedef struct DqTrajectory DqTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the next
// failing call on this thread.
const char *dq_last_error(void);

// Library version as a static NUL-terminated string.
const char *dq_version(void);

// Builds a two-level model. `rwa != 0` selects the frame rotating at the
// transition frequency; otherwise the lab frame. Rates are angular
// frequencies: `decay` is |2⟩→|1⟩, `excitation` |1⟩→|2⟩, `dephasing` the
// total coherence damping.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum DqStatus dq_two_level_new(double e1,
                               double e2,
                               double d1,
                               double d2,
                               double decay,
                               double excitation,
                               double dephasing,
                               int32_t rwa,
                               struct DqModel **out);

// # Safety
// `model` must be NULL or a handle from [`dq_two_level_new`] not yet freed.
void dq_model_free(struct DqModel *model);

// Evolves `rho0` under a resonant Gaussian pulse on the x control with
// effective area `area` (radians) lasting `duration`, sampled every
// `dt_out` up to `horizon`. A `max_step` ≤ 0 leaves the step unbounded.
//
// # Safety
// `model` must be a live handle, `rho0` must point to 8 doubles and `out`
// to writable storage for one handle.
enum DqStatus dq_evolve_gaussian(const struct DqModel *model,
                                 const double *rho0,
                                 double area,
                                 double duration,
                                 double horizon,
                                 double dt_out,
                                 double max_step,
                                 struct DqTrajectory **out);

// # Safety
// `traj` must be NULL or a live trajectory handle.
void dq_trajectory_free(struct DqTrajectory *traj);

// Number of samples; 0 for NULL.
//
// # Safety
// `traj` must be NULL or a live trajectory handle.
size_t dq_trajectory_len(const struct DqTrajectory *traj);

// Hilbert-space dimension; 0 for NULL.
//
// # Safety
// `traj` must be NULL or a live trajectory handle.
size_t dq_trajectory_dim(const struct DqTrajectory *traj);

// Time, purity deficit and Rényi entropy of sample `k`. Any output pointer
// may be NULL.
//
// # Safety
// `traj` must be a live handle; non-NULL outputs must be writable.
enum DqStatus dq_trajectory_sample(const struct DqTrajectory *traj,
                                   size_t k,
                                   double *time,
                                   double *purity_deficit,
                                   double *renyi_entropy);

// Copies ρ at sample `k` into `buf` (`2 * dim * dim` doubles, row-major
// interleaved re/im). `len` is the buffer length in doubles.
//
// # Safety
// `traj` must be a live handle and `buf` valid for `len` writes.
enum DqStatus dq_trajectory_state(const struct DqTrajectory *traj,
                                  size_t k,
                                  double *buf,
                                  size_t len);

// 1 − Tr ρ² of a state given as `2 * dim * dim` interleaved doubles.
//
// # Safety
// `rho` must point to `2 * dim * dim` doubles and `out` be writable.
enum DqStatus dq_purity_deficit(const double *rho, size_t dim, double *out);

// Runs a config file as the CLI would. `scenario` is one of "simulate",
// "optimize", "pump", "check". `out_dir` may be NULL to use the config's
// directory. A failing check returns `CheckFailed`.
//
// # Safety
// `path` and `scenario` must be NUL-terminated strings; `out_dir` NULL or
// NUL-terminated.
enum DqStatus dq_run_config(const char *path, const char *scenario, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQC_H */
