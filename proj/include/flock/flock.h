#ifndef FLOCK_FLOCK_H
#define FLOCK_FLOCK_H

/* C interface to the failure-perturbed Cucker-Smale toolkit.
 *
 * Every function returns a flock_status. On anything other than FLOCK_OK a
 * message describing the failure is available from flock_last_error() on
 * the calling thread until the next call into the library. Handles are
 * opaque, owned by the caller, and released with the matching *_free
 * function (which accepts NULL). Handles are not safe for concurrent
 * mutation; distinct handles may be used from different threads. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FLOCK_BUILDING_LIBRARY)
#    define FLOCK_API __declspec(dllexport)
#  else
#    define FLOCK_API __declspec(dllimport)
#  endif
#else
#  define FLOCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flock_status {
    FLOCK_OK = 0,
    FLOCK_ERR_INVALID_ARGUMENT = 1,
    FLOCK_ERR_CONFIG = 2,
    FLOCK_ERR_NUMERIC = 3,
    FLOCK_ERR_IO = 4,
    FLOCK_ERR_INTERNAL = 5
} flock_status;

typedef struct flock_config flock_config;
typedef struct flock_trajectory flock_trajectory;
typedef struct flock_sweep flock_sweep;
typedef struct flock_bound_report flock_bound_report;

typedef struct flock_row {
    uint64_t t;
    double v_norm;
    double log_v_norm;  /* NaN when the norm is below 1e-300 */
    double fiedler_colored;
    double fiedler_plain;
    int connected;
    double mu;          /* NaN when the step has no edge */
    double s_partial;
} flock_row;

typedef struct flock_check {
    const char* name;   /* valid while the report lives */
    int passed;
    int informational;
    uint64_t checked;
    uint64_t failed;
    double worst_margin; /* NaN when nothing was checked */
} flock_check;

typedef struct flock_estimate {
    double value;
    double std_error;
} flock_estimate;

FLOCK_API const char* flock_version(void);
FLOCK_API const char* flock_rng_algorithm(void);
FLOCK_API const char* flock_last_error(void);

/* Config documents are JSON objects. Sweep configs may give k, alpha and
 * lambda as arrays. */
FLOCK_API flock_status flock_config_parse(const char* json_text, flock_config** out);
FLOCK_API flock_status flock_config_load(const char* path, flock_config** out);
/* Applies one "key=value" override; the value is read as JSON if possible. */
FLOCK_API flock_status flock_config_set(flock_config* config, const char* assignment);
FLOCK_API flock_status flock_config_set_seed(flock_config* config, uint64_t seed);
/* Number of grid cells (1 for single-run configs). */
FLOCK_API flock_status flock_config_cells(const flock_config* config, size_t* out);
/* Normalized JSON for one cell; the string lives until the config is freed or changed. */
FLOCK_API flock_status flock_config_describe(const flock_config* config, size_t cell, const char** out);
FLOCK_API void flock_config_free(flock_config* config);

/* Runs the config (which must describe a single cell). */
FLOCK_API flock_status flock_simulate(const flock_config* config, flock_trajectory** out);
FLOCK_API size_t flock_trajectory_rows(const flock_trajectory* trajectory);
FLOCK_API flock_status flock_trajectory_row(const flock_trajectory* trajectory, size_t index, flock_row* out);
/* First recorded step with v_norm < epsilon, or -1. */
FLOCK_API int64_t flock_trajectory_flocking_step(const flock_trajectory* trajectory, double epsilon);
/* Least-squares slope and r^2 of log v_norm over t in [first, last]. */
FLOCK_API flock_status flock_trajectory_fit_decay(const flock_trajectory* trajectory, uint64_t first, uint64_t last,
                                                  double* slope, double* r_squared);
/* CSV at `path` plus `path`.meta.json. */
FLOCK_API flock_status flock_trajectory_write(const flock_trajectory* trajectory, const char* path);
FLOCK_API void flock_trajectory_free(flock_trajectory* trajectory);

/* threads = 0 uses the hardware concurrency. */
FLOCK_API flock_status flock_sweep_run(const flock_config* config, uint64_t n_runs, unsigned threads,
                                       flock_sweep** out);
FLOCK_API size_t flock_sweep_cells(const flock_sweep* sweep);
FLOCK_API flock_status flock_sweep_flocking_fraction(const flock_sweep* sweep, size_t cell, double* out);
FLOCK_API flock_status flock_sweep_write(const flock_sweep* sweep, const char* path);
FLOCK_API void flock_sweep_free(flock_sweep* sweep);

FLOCK_API flock_status flock_critical_velocity_estimate(size_t k, double lambda, uint64_t n_samples, uint64_t seed,
                                                        flock_estimate* out);
/* k in [2, 5]. */
FLOCK_API flock_status flock_critical_velocity_exact(size_t k, double lambda, double* out);
/* One row per (k, lambda) cell of the config; exact column filled for k <= 5. */
FLOCK_API flock_status flock_critical_velocity_write(const flock_config* config, uint64_t n_samples,
                                                     const char* path);

FLOCK_API flock_status flock_verify_bounds(const flock_config* config, flock_bound_report** out);
FLOCK_API int flock_bound_report_passed(const flock_bound_report* report);
FLOCK_API size_t flock_bound_report_checks(const flock_bound_report* report);
FLOCK_API flock_status flock_bound_report_check(const flock_bound_report* report, size_t index, flock_check* out);
/* Human-readable report, one PASS/FAIL line per check; lives with the report. */
FLOCK_API const char* flock_bound_report_text(const flock_bound_report* report);
FLOCK_API flock_status flock_bound_report_write(const flock_bound_report* report, const char* path);
FLOCK_API void flock_bound_report_free(flock_bound_report* report);

/* Fiedler number of a k x k row-major symmetric weight matrix with zero diagonal. */
FLOCK_API flock_status flock_fiedler(const double* weights, size_t k, double* out);

#ifdef __cplusplus
}
#endif

#endif /* FLOCK_FLOCK_H */
