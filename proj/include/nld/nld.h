/* C interface of the nonlinear Dirac characteristics solver.
 *
 * Every function returns an nld_status.  On failure a description is
 * available from nld_last_error() until the next call on the same thread.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function (passing NULL is allowed).
 *
 * Text results are copied into caller buffers: pass buf = NULL or a buffer
 * that is too small to learn the required size (including the terminating
 * NUL) through *needed; NLD_ERR_BUFFER_TOO_SMALL is returned in the latter
 * case. */
#ifndef NLD_NLD_H
#define NLD_NLD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NLD_API __declspec(dllexport)
#else
#define NLD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nld_status {
  NLD_OK = 0,
  NLD_ERR_INVALID_ARGUMENT = 1,
  NLD_ERR_SUPPORT_OVERFLOW = 2,
  NLD_ERR_GRID_MISMATCH = 3,
  NLD_ERR_OFF_LATTICE = 4,
  NLD_ERR_BLOW_UP = 5,
  NLD_ERR_FIXED_POINT_DIVERGENCE = 6,
  NLD_ERR_MISSING_DATA = 7,
  NLD_ERR_CONFIG_INVALID = 8,
  NLD_ERR_IO = 9,
  NLD_ERR_BUFFER_TOO_SMALL = 10,
  NLD_ERR_INTERNAL = 99
} nld_status;

typedef struct nld_config nld_config;
typedef struct nld_result nld_result;
typedef struct nld_sweep nld_sweep;
typedef struct nld_trajectory nld_trajectory;

NLD_API const char* nld_last_error(void);
NLD_API const char* nld_status_name(nld_status status);
NLD_API const char* nld_version(void);

/* ---- configuration ---- */

/* Parses `key = value` text.  On NLD_ERR_CONFIG_INVALID no handle is
 * created and nld_last_error() lists every violation, one per line. */
NLD_API nld_status nld_config_parse(const char* text, nld_config** out);
NLD_API nld_status nld_config_load(const char* path, nld_config** out);
NLD_API void nld_config_free(nld_config* cfg);

/* Number of violations found in `text` (0 when valid) and their messages. */
NLD_API nld_status nld_parse_violations(const char* text, size_t* count);
NLD_API nld_status nld_parse_violation(const char* text, size_t index, char* buf, size_t cap, size_t* needed);

NLD_API nld_status nld_config_canonical(const nld_config* cfg, char* buf, size_t cap, size_t* needed);
NLD_API nld_status nld_config_hash(const nld_config* cfg, uint64_t* hash);
NLD_API nld_status nld_config_output_dir(const nld_config* cfg, char* buf, size_t cap, size_t* needed);

/* ---- experiments ---- */

/* Runs the experiment and writes its artifacts to output_dir (NULL: the
 * configured directory).  A solver abort still yields a result handle whose
 * exit status is 3; NLD_OK means the run completed, not that checks passed. */
NLD_API nld_status nld_run(const nld_config* cfg, const char* output_dir, nld_result** out);
NLD_API void nld_result_free(nld_result* res);
/* 0 all checks passed, 1 some check failed, 3 solver abort. */
NLD_API nld_status nld_result_exit_status(const nld_result* res, int* status);
NLD_API nld_status nld_result_check_count(const nld_result* res, size_t* count);
NLD_API nld_status nld_result_check(const nld_result* res, size_t index, const char** name, double* value,
                                    double* tolerance, int* passed);
NLD_API nld_status nld_result_summary_json(const nld_result* res, char* buf, size_t cap, size_t* needed);

NLD_API nld_status nld_run_sweep(const nld_config* cfg, unsigned halvings, const char* output_dir, nld_sweep** out);
NLD_API void nld_sweep_free(nld_sweep* sweep);
NLD_API nld_status nld_sweep_table(const nld_sweep* sweep, char* buf, size_t cap, size_t* needed);
NLD_API nld_status nld_sweep_csv(const nld_sweep* sweep, char* buf, size_t cap, size_t* needed);

/* ---- direct solver access ---- */

/* Runs the configured problem and keeps the trajectory in memory (no files). */
NLD_API nld_status nld_simulate(const nld_config* cfg, nld_trajectory** out);
NLD_API void nld_trajectory_free(nld_trajectory* traj);
/* Unpadded node count and the recorded snapshot times. */
NLD_API nld_status nld_trajectory_nodes(const nld_trajectory* traj, size_t* count);
NLD_API nld_status nld_trajectory_times(const nld_trajectory* traj, double* times, size_t cap, size_t* count);
/* Copies u and v at recorded time t as interleaved (re, im) pairs, 2 * nodes
 * doubles each.  Either output may be NULL. */
NLD_API nld_status nld_trajectory_field(const nld_trajectory* traj, double t, double* u, double* v);
NLD_API nld_status nld_trajectory_charge_drift(const nld_trajectory* traj, double* drift);
NLD_API nld_status nld_trajectory_envelope_violation(const nld_trajectory* traj, double* violation);

/* N1, N2 at one point; n1 and n2 receive (re, im). */
NLD_API nld_status nld_eval_nonlinearity(double alpha, double beta, double u_re, double u_im, double v_re,
                                         double v_im, double n1[2], double n2[2]);

#ifdef __cplusplus
}
#endif

#endif /* NLD_NLD_H */
