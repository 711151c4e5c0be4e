/* C interface to the odeident core: latent-confounded linear ODE systems,
 * identifiability rank checks, exact simulation and interventions, recovery,
 * and NLS replication experiments.
 *
 * Conventions: every function returns an oi_status (OI_OK == 0 on success);
 * objects are opaque handles released with their _destroy function; strings
 * produced by the library are released with oi_string_free. Matrices cross
 * the boundary in row-major order. A thread-local message with detail about
 * the most recent failure is available from oi_last_error().
 */
#ifndef ODEIDENT_H
#define ODEIDENT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oi_status {
    OI_OK = 0,
    OI_ERR_INVALID_ARGUMENT = 1,
    OI_ERR_DIMENSION = 2,
    OI_ERR_NOT_A_DAG = 3,
    OI_ERR_SINGULAR = 4,
    OI_ERR_NUMERIC = 5,
    OI_ERR_UNKNOWN_CONDITION = 6,
    OI_ERR_PARSE = 7,
    OI_ERR_IO = 8,
    OI_ERR_INTERNAL = 9
} oi_status;

typedef struct oi_system oi_system;

const char* oi_version(void);

/* Human-readable name of a status code. */
const char* oi_status_message(oi_status status);

/* Detail message for the last failure on this thread ("" if none). */
const char* oi_last_error(void);

void oi_string_free(char* s);

/* --- systems ------------------------------------------------------------ */

/* Build a system from a JSON description: the "system" object of a config
 * file ({"kind": "latent_dag", "x0": [...], ...}). */
oi_status oi_system_create_json(const char* system_json, oi_system** out);
void oi_system_destroy(oi_system* sys);

oi_status oi_system_dims(const oi_system* sys, int* d, int* p);

/* x(t) for one time; out_x must hold d doubles. */
oi_status oi_system_observed_state(const oi_system* sys, double t, double* out_x);

/* x(t_j) for a strictly increasing grid; out holds n*d doubles row-major. */
oi_status oi_system_sample(const oi_system* sys, const double* times, int n, double* out);

/* Post-intervention trajectory with observable coordinate clamp_index
 * (1-based) held at value; latent-DAG systems only. */
oi_status oi_system_intervene(const oi_system* sys, int clamp_index, double value,
                              const double* times, int n, double* out);

/* Run one identifiability condition. condition_json:
 *   {"id": "B1", "tolerance": null, "n": 10, "z0_stars": [...], ...}
 * (grid/controlled-state parameters as in config task blocks).
 * On success *report_json receives the report object. */
oi_status oi_system_check(const oi_system* sys, const char* condition_json, char** report_json);

/* --- whole experiments ---------------------------------------------------*/

/* Parse, run, and (when out_dir is non-NULL) persist a full experiment
 * config. overrides_json may be NULL or an object with any of
 * {"task_type","seed","reps","tolerance","format"}.
 * On success *record_json receives the result record. */
oi_status oi_run_config_json(const char* config_json, const char* overrides_json,
                             const char* out_dir, char** record_json);

/* Same, reading the config from a file. */
oi_status oi_run_config_file(const char* path, const char* overrides_json, const char* out_dir,
                             char** record_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ODEIDENT_H */
