/* C interface to the emosens library.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Functions return an emosens_status; on failure the thread's last error
 * message is available from emosens_last_error() until the next call.
 * Strings returned through char** outputs are owned by the caller and are
 * released with emosens_string_free. JSON arguments are UTF-8 text.
 */
#ifndef EMOSENS_H
#define EMOSENS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EMOSENS_API __declspec(dllexport)
#else
#define EMOSENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum emosens_status {
  EMOSENS_OK = 0,
  EMOSENS_ERR_INVALID_ARGUMENT = 1, /* null handle, bad option */
  EMOSENS_ERR_IO = 2,
  EMOSENS_ERR_INPUT = 3,   /* malformed file, schema, label or hyperparameter */
  EMOSENS_ERR_COMPUTE = 4, /* signal, data or training failure */
  EMOSENS_ERR_INTERNAL = 5
} emosens_status;

typedef struct emosens_dataset emosens_dataset;
typedef struct emosens_report emosens_report;
typedef struct emosens_model emosens_model;

EMOSENS_API const char* emosens_version(void);
EMOSENS_API const char* emosens_last_error(void);
/* Name of the library error kind behind the last failure, e.g. "TooManyFolds". */
EMOSENS_API const char* emosens_last_error_kind(void);
EMOSENS_API void emosens_string_free(char* s);

/* Synthetic corpus: manifest.json plus ECG CSVs under out_dir. */
typedef struct emosens_corpus_options {
  size_t subjects;
  size_t trials;
  double duration_s;
  double sampling_rate_hz;
  double noise_std_mv;
  uint64_t seed;
} emosens_corpus_options;

EMOSENS_API void emosens_corpus_options_default(emosens_corpus_options* options);
EMOSENS_API emosens_status emosens_synth_corpus(const char* out_dir, const emosens_corpus_options* options);

/* Feature extraction from a manifest. trace_dir may be NULL. failures_json
 * receives a JSON array of per-trial failures (possibly empty) and may be
 * NULL when not wanted. */
EMOSENS_API emosens_status emosens_extract_features(const char* manifest_path, const char* trace_dir,
                                                    emosens_dataset** out, char** failures_json);
/* Same pipeline over an in-memory synthetic corpus. */
EMOSENS_API emosens_status emosens_extract_synthetic(const emosens_corpus_options* options,
                                                     emosens_dataset** out);

EMOSENS_API emosens_status emosens_dataset_load_csv(const char* path, emosens_dataset** out);
EMOSENS_API emosens_status emosens_dataset_save_csv(const emosens_dataset* data, const char* path);
EMOSENS_API void emosens_dataset_free(emosens_dataset* data);
EMOSENS_API size_t emosens_dataset_rows(const emosens_dataset* data);
EMOSENS_API size_t emosens_dataset_features(const emosens_dataset* data);
EMOSENS_API size_t emosens_dataset_groups(const emosens_dataset* data);
/* Regroup rows: "subject" (default) or "trial". */
EMOSENS_API emosens_status emosens_dataset_set_grouping(emosens_dataset* data, const char* key);
/* Permute labels with a seeded shuffle; for permutation baselines. */
EMOSENS_API emosens_status emosens_dataset_shuffle_labels(emosens_dataset* data, uint64_t seed);

/* Evaluation. hyperparams_json may be NULL or "{}" for defaults. */
EMOSENS_API emosens_status emosens_cross_validate(const emosens_dataset* data, const char* model_tag,
                                                  const char* hyperparams_json, size_t k,
                                                  emosens_report** out);
/* grid_json: JSON array of hyperparameter objects. */
EMOSENS_API emosens_status emosens_grid_search(const emosens_dataset* data, const char* model_tag,
                                               const char* grid_json, size_t k, emosens_report** out);
/* Cross-validates hp and attaches a learning curve over the given fractions. */
EMOSENS_API emosens_status emosens_learning_curve(const emosens_dataset* data, const char* model_tag,
                                                  const char* hyperparams_json, const double* fractions,
                                                  size_t n_fractions, size_t k, uint64_t seed,
                                                  emosens_report** out);
/* Built-in grid for a model tag as a JSON array. */
EMOSENS_API emosens_status emosens_default_grid(const char* model_tag, char** grid_json);
EMOSENS_API void emosens_report_free(emosens_report* report);
/* Mean of a metric by name ("accuracy", "f1_weighted", ...). */
EMOSENS_API emosens_status emosens_report_mean(const emosens_report* report, const char* metric, double* value);
EMOSENS_API emosens_status emosens_report_json(const emosens_report* report, char** json);
/* Fails with EMOSENS_ERR_INVALID_ARGUMENT when the report has no curve. */
EMOSENS_API emosens_status emosens_report_curve_csv(const emosens_report* report, char** csv);

/* Models. Training uses the dataset as given; no scaling is applied. */
EMOSENS_API emosens_status emosens_model_train(const emosens_dataset* data, const char* model_tag,
                                               const char* hyperparams_json, emosens_model** out);
EMOSENS_API emosens_status emosens_model_save(const emosens_model* model, const char* path);
EMOSENS_API emosens_status emosens_model_load(const char* path, emosens_model** out);
EMOSENS_API void emosens_model_free(emosens_model* model);
/* labels_out receives one emotion index (0..8) per dataset row. */
EMOSENS_API emosens_status emosens_model_predict(const emosens_model* model, const emosens_dataset* data,
                                                 int* labels_out, size_t n_rows);

/* Writes through a temporary sibling file and renames it into place. */
EMOSENS_API emosens_status emosens_write_file(const char* path, const char* content);

EMOSENS_API size_t emosens_num_emotions(void);
EMOSENS_API const char* emosens_emotion_name(size_t index);

#ifdef __cplusplus
}
#endif

#endif
