/* C API for the registration / self-training pipeline. Opaque handles and
 * integer status codes; every function that can fail returns an sgp_status
 * and leaves a human-readable message in sgp_last_error() (thread-local).
 */
#ifndef SGP_C_H
#define SGP_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGP_API __declspec(dllexport)
#else
#define SGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgp_status {
  SGP_OK = 0,
  SGP_ERR_INVALID_ARGUMENT = 1,
  SGP_ERR_IO = 2,
  SGP_ERR_PARSE = 3,
  SGP_ERR_CONFIG = 4,
  SGP_ERR_NO_MODEL = 5,
  SGP_ERR_NUMERIC = 6,
  SGP_ERR_INTERNAL = 7
} sgp_status;

/* Opaque pipeline configuration (key = value model, see docs/README). */
typedef struct sgp_config sgp_config;

SGP_API const char* sgp_version(void);

/* Message for the most recent failing call on this thread. */
SGP_API const char* sgp_last_error(void);

/* ---- configuration ---- */

SGP_API sgp_config* sgp_config_create(void);
SGP_API sgp_status sgp_config_load(const char* path, sgp_config** out);
SGP_API sgp_status sgp_config_set(sgp_config* config, const char* key, const char* value);
/* Checks all cross-key invariants (loading a file validates implicitly;
 * sgp_config_set does not, so interdependent keys can be set in sequence). */
SGP_API sgp_status sgp_config_validate(const sgp_config* config);
SGP_API sgp_status sgp_config_save(const sgp_config* config, const char* path);
SGP_API void sgp_config_free(sgp_config* config);

/* ---- synthetic dataset generation ---- */

typedef struct sgp_datagen_params {
  int n_train;
  int n_test;
  uint64_t seed;
  double target_overlap;    /* fraction in (0, 1] */
  double noise_sigma;       /* meters, Gaussian on cloud B */
  double clutter_fraction;  /* [0, 1), clutter points added to B */
  double rot_min_deg;
  double rot_max_deg;
  double trans_min;         /* meters */
  double trans_max;
  int points_per_scene;
} sgp_datagen_params;

/* Fills the calibrated default difficulty preset. */
SGP_API void sgp_datagen_params_init(sgp_datagen_params* params);

/* Writes clouds/ *.ply plus train.csv and test.csv under out_dir. */
SGP_API sgp_status sgp_generate_dataset(const char* out_dir, const sgp_datagen_params* params);

/* ---- pipeline operations ---- */

/* Bootstrap labels for a manifest; writes a labels CSV. config NULL = defaults. */
SGP_API sgp_status sgp_bootstrap(const char* train_manifest, const sgp_config* config,
                                 const char* out_labels_csv);

/* Full teacher-student loop. test/validation manifests may be NULL; the run
 * directory receives config.txt, labels.csv, metrics.csv, bootstrap.csv and
 * per-iteration model checkpoints. */
SGP_API sgp_status sgp_run(const char* train_manifest, const char* test_manifest,
                           const char* validation_manifest, const sgp_config* config,
                           const char* run_dir);

/* Registers one pair of PLY files. model_path NULL = bootstrap matcher.
 * transform_out: 12 doubles, row-major rotation then translation. */
SGP_API sgp_status sgp_register_pair(const char* ply_a, const char* ply_b,
                                     const char* model_path, const sgp_config* config,
                                     double transform_out[12], double* inlier_rate_out);

/* Registration recall (percent) of a saved model over a manifest that
 * carries ground-truth transforms. */
SGP_API sgp_status sgp_evaluate(const char* model_path, const char* manifest,
                                const sgp_config* config, double* recall_out);

/* Resolves (and optionally copies to out_path, when non-NULL) a run
 * directory's metrics.csv; the resulting path is written into
 * resolved_path_out (truncated to resolved_cap, always NUL-terminated). */
SGP_API sgp_status sgp_export_metrics(const char* run_dir, const char* out_path,
                                      char* resolved_path_out, size_t resolved_cap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SGP_C_H */
