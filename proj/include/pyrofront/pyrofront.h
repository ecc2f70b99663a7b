/* C interface to the pyrofront library. All handles are opaque; every call
 * that can fail returns a pf_status, and pf_last_error() holds the message of
 * the most recent failure on the calling thread. Strings returned through
 * char** are owned by the caller and released with pf_string_free. */
#ifndef PYROFRONT_PYROFRONT_H_
#define PYROFRONT_PYROFRONT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PYROFRONT_BUILDING_LIBRARY)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_INVALID_ARGUMENT = 1,
  PF_ERR_CONFIG = 2,
  PF_ERR_IO = 3,
  PF_ERR_NUMERIC = 4,
  PF_ERR_STATE = 5,
  PF_ERR_INTERNAL = 99
} pf_status;

typedef struct pf_config pf_config;
typedef struct pf_run pf_run;
typedef struct pf_env pf_env;

PF_API const char* pf_version(void);
PF_API const char* pf_last_error(void);
PF_API const char* pf_status_name(pf_status status);
PF_API void pf_string_free(char* s);

/* Configuration. */
PF_API pf_status pf_config_create(pf_config** out);
PF_API pf_status pf_config_load(const char* path, pf_config** out);
PF_API pf_status pf_config_from_json(const char* text, pf_config** out);
PF_API pf_status pf_config_clone(const pf_config* cfg, pf_config** out);
/* "key=value"; dotted keys (env.grid_size) or short aliases (grid, fov, seed, ...). */
PF_API pf_status pf_config_set(pf_config* cfg, const char* assignment);
PF_API pf_status pf_config_validate(const pf_config* cfg);
PF_API pf_status pf_config_to_json(const pf_config* cfg, char** out);
PF_API pf_status pf_config_output_dir(const pf_config* cfg, char** out);
PF_API pf_status pf_config_run_id(const pf_config* cfg, char** out);
PF_API void pf_config_free(pf_config* cfg);

/* Experiments. On failure the partial outputs already written stay in
 * run_dir and *out is left NULL. */
PF_API pf_status pf_run_experiment(const pf_config* cfg, const char* run_dir, pf_run** out);
PF_API pf_status pf_scan_demo(const pf_config* cfg, const char* run_dir, pf_run** out);
PF_API int pf_run_episode_count(const pf_run* run);
PF_API int pf_run_complete(const pf_run* run);
PF_API pf_status pf_run_episode_metrics(const pf_run* run, int episode, double* coverage, double* time_average_mia,
                                        int* steps);
PF_API pf_status pf_run_observed_fraction(const pf_run* run, int episode, double* out);
PF_API pf_status pf_run_summary_json(const pf_run* run, char** out);
PF_API void pf_run_free(pf_run* run);

/* Analytic vs central-difference gradients of the value network. */
PF_API pf_status pf_gradient_check(int reduced_net, int grid_size, uint64_t seed, int samples,
                                   double* max_relative_error, size_t* checked);

/* Run-directory tools. */
PF_API pf_status pf_recompute_metrics(const char* run_dir, char** summary_json);
PF_API pf_status pf_export_artifacts(const char* run_dir, char** manifest_json);

/* Stand-alone environment. Grids: "F", "f", "A", "phi"; row-major with
 * index y * N + x. */
PF_API pf_status pf_env_create(const pf_config* cfg, uint64_t seed, pf_env** out);
PF_API pf_status pf_env_step(pf_env* env);
PF_API int pf_env_size(const pf_env* env);
PF_API int pf_env_time(const pf_env* env);
PF_API pf_status pf_env_grid(const pf_env* env, const char* name, double* out, size_t len);
PF_API void pf_env_free(pf_env* env);

#ifdef __cplusplus
}
#endif

#endif /* PYROFRONT_PYROFRONT_H_ */
