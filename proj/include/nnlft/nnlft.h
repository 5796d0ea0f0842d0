/* SPDX-License-Identifier: Apache-2.0 */

/*
 * C interface to the non-negative latent factorization of tensors library.
 *
 * Objects are opaque handles created by nnlft_*_create / _load / _ingest and
 * released with the matching nnlft_*_free. Every fallible call returns an
 * nnlft_status; on failure nnlft_last_error() describes the cause. The
 * message is thread-local and valid until the next failing call on the same
 * thread. Handles may be read concurrently but not mutated concurrently.
 */

#ifndef NNLFT_H
#define NNLFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NNLFT_BUILDING_DLL)
#    define NNLFT_API __declspec(dllexport)
#  else
#    define NNLFT_API __declspec(dllimport)
#  endif
#else
#  define NNLFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes for the command-line tool. */
typedef enum nnlft_status {
  NNLFT_OK = 0,
  NNLFT_ERR_CONFIG = 1,
  NNLFT_ERR_DATA = 2,
  NNLFT_ERR_DIVERGENCE = 3,
  NNLFT_ERR_INTERNAL = 5
} nnlft_status;

typedef enum nnlft_duplicate_policy { NNLFT_DUP_MEAN = 0, NNLFT_DUP_LAST_WINS = 1 } nnlft_duplicate_policy;

typedef enum nnlft_reg_mode { NNLFT_REG_EXACT = 0, NNLFT_REG_RAW_Y = 1 } nnlft_reg_mode;

typedef enum nnlft_update_rule { NNLFT_RULE_MOMENTUM = 0, NNLFT_RULE_PLAIN_SGD = 1 } nnlft_update_rule;

typedef enum nnlft_subset {
  NNLFT_SUBSET_TRAIN = 0,
  NNLFT_SUBSET_VALIDATION = 1,
  NNLFT_SUBSET_TEST = 2,
  NNLFT_SUBSET_ALL = 3
} nnlft_subset;

typedef enum nnlft_stop_reason { NNLFT_STOP_PATIENCE = 0, NNLFT_STOP_MAX_EPOCHS = 1 } nnlft_stop_reason;

typedef struct nnlft_tensor nnlft_tensor;
typedef struct nnlft_manifest nnlft_manifest;
typedef struct nnlft_split nnlft_split;
typedef struct nnlft_model nnlft_model;
typedef struct nnlft_trace nnlft_trace;

NNLFT_API const char* nnlft_last_error(void);
NNLFT_API const char* nnlft_version(void);

/* ---- tensors ---------------------------------------------------------- */

NNLFT_API nnlft_status nnlft_tensor_create(const size_t dims[3], nnlft_tensor** out);
NNLFT_API nnlft_status nnlft_tensor_load(const char* path, nnlft_tensor** out);
NNLFT_API nnlft_status nnlft_tensor_save(const nnlft_tensor* tensor, const char* path);
NNLFT_API void nnlft_tensor_free(nnlft_tensor* tensor);

NNLFT_API nnlft_status nnlft_tensor_insert(nnlft_tensor* tensor, uint32_t i, uint32_t j, uint32_t k, double value,
                                           nnlft_duplicate_policy policy);
NNLFT_API void nnlft_tensor_shape(const nnlft_tensor* tensor, size_t dims[3]);
NNLFT_API size_t nnlft_tensor_size(const nnlft_tensor* tensor);
NNLFT_API double nnlft_tensor_density(const nnlft_tensor* tensor);
NNLFT_API nnlft_status nnlft_tensor_entry(const nnlft_tensor* tensor, size_t n, uint32_t* i, uint32_t* j, uint32_t* k,
                                          double* value);

/* ---- ingestion -------------------------------------------------------- */

/* Reads a 4-field (source, target, weight, timestamp) edge list. */
NNLFT_API nnlft_status nnlft_ingest_file(const char* edge_list_path, char delimiter, size_t k_slots,
                                         nnlft_duplicate_policy policy, nnlft_tensor** tensor_out,
                                         nnlft_manifest** manifest_out);
/* Writes manifest.tsv, id_map_i.tsv and id_map_j.tsv into an existing directory. */
NNLFT_API nnlft_status nnlft_manifest_save(const nnlft_manifest* manifest, const char* dir);
NNLFT_API size_t nnlft_manifest_record_count(const nnlft_manifest* manifest);
NNLFT_API void nnlft_manifest_free(nnlft_manifest* manifest);

/* ---- synthetic ground truth ------------------------------------------- */

/* truth_out may be NULL. */
NNLFT_API nnlft_status nnlft_synth(const size_t dims[3], size_t true_rank, size_t n_entries, double noise_sd,
                                   uint64_t seed, nnlft_tensor** tensor_out, nnlft_model** truth_out);

/* ---- splits ----------------------------------------------------------- */

NNLFT_API nnlft_status nnlft_split_create(const nnlft_tensor* tensor, const double ratios[3], uint64_t seed,
                                          nnlft_split** out);
NNLFT_API void nnlft_split_free(nnlft_split* split);
NNLFT_API void nnlft_split_sizes(const nnlft_split* split, size_t sizes[3]);
/* Borrowed view of the entry positions of one subset (not NNLFT_SUBSET_ALL). */
NNLFT_API nnlft_status nnlft_split_indices(const nnlft_split* split, nnlft_subset subset, const size_t** data,
                                           size_t* count);

/* ---- training --------------------------------------------------------- */

typedef struct nnlft_train_config {
  size_t rank;
  double eta;
  double lambda;
  double gamma;
  int max_epochs;
  int patience;
  double min_improvement;
  uint64_t seed;
  nnlft_reg_mode reg_mode;
  double init_scale;
  nnlft_update_rule update_rule;
} nnlft_train_config;

NNLFT_API void nnlft_train_config_init(nnlft_train_config* config);

/*
 * Per-epoch observer. The tables are row-major (dims[m] x rank) decision
 * parameters of the current state, valid only for the duration of the call.
 */
typedef void (*nnlft_epoch_fn)(int epoch, const double* y_i, const double* y_j, const double* y_k,
                               const size_t dims[3], size_t rank, void* user);

/* Either output may be NULL. observer may be NULL. */
NNLFT_API nnlft_status nnlft_train(const nnlft_tensor* tensor, const nnlft_split* split,
                                   const nnlft_train_config* config, nnlft_epoch_fn observer, void* user,
                                   nnlft_model** model_out, nnlft_trace** trace_out);

NNLFT_API void nnlft_trace_free(nnlft_trace* trace);
NNLFT_API size_t nnlft_trace_epochs(const nnlft_trace* trace);
NNLFT_API nnlft_status nnlft_trace_record(const nnlft_trace* trace, size_t n, int* epoch, double* train_loss,
                                          double* val_rmse);
NNLFT_API void nnlft_trace_best(const nnlft_trace* trace, int* epoch, double* val_rmse);
NNLFT_API nnlft_stop_reason nnlft_trace_stop_reason(const nnlft_trace* trace);
/* "epoch,train_loss,val_rmse" rows followed by "#best,<epoch>,<val_rmse>". */
NNLFT_API nnlft_status nnlft_trace_write_csv(const nnlft_trace* trace, const char* path);

/* ---- models ----------------------------------------------------------- */

NNLFT_API nnlft_status nnlft_model_load(const char* path, nnlft_model** out);
NNLFT_API nnlft_status nnlft_model_save(const nnlft_model* model, const char* path);
NNLFT_API void nnlft_model_free(nnlft_model* model);
NNLFT_API void nnlft_model_shape(const nnlft_model* model, size_t dims[3], size_t* rank);
NNLFT_API uint64_t nnlft_model_seed(const nnlft_model* model);
NNLFT_API nnlft_status nnlft_model_predict(const nnlft_model* model, uint32_t i, uint32_t j, uint32_t k, double* out);

/* ---- evaluation ------------------------------------------------------- */

/* split may be NULL only with NNLFT_SUBSET_ALL. Any output may be NULL. */
NNLFT_API nnlft_status nnlft_evaluate(const nnlft_model* model, const nnlft_tensor* tensor, const nnlft_split* split,
                                      nnlft_subset subset, double* rmse, double* mae, size_t* count);

/*
 * Ranks traces by best validation RMSE (ties keep input order) and writes
 * "label,best_rmse,epochs_to_best" to csv_path when it is not NULL. When
 * order_out is not NULL it receives the input positions in report order.
 */
NNLFT_API nnlft_status nnlft_compare_runs(const char* const* labels, const nnlft_trace* const* traces, size_t count,
                                          const char* csv_path, size_t* order_out);

/* ---- gradient check --------------------------------------------------- */

typedef enum nnlft_grad_variant {
  NNLFT_GRAD_EXACT = 0,
  /* Deliberate mutant: the gradient with its sign flipped. */
  NNLFT_GRAD_FLIPPED_SIGN = 1,
  /* lambda * y in place of lambda * sigmoid(y). */
  NNLFT_GRAD_RAW_Y = 2
} nnlft_grad_variant;

typedef struct nnlft_grad_check_options {
  size_t samples;
  uint64_t seed;
  double lambda_max;
  int zero_lambda;
  nnlft_grad_variant variant;
} nnlft_grad_check_options;

typedef struct nnlft_grad_check_result {
  size_t samples;
  size_t components;
  double max_rel_error;
  double tolerance;
  int passed;
} nnlft_grad_check_result;

NNLFT_API void nnlft_grad_check_options_init(nnlft_grad_check_options* options);
/* worst_case (may be NULL) receives a NUL-terminated description of the worst sample. */
NNLFT_API nnlft_status nnlft_grad_check(const nnlft_grad_check_options* options, nnlft_grad_check_result* result,
                                        char* worst_case, size_t worst_case_len);

#ifdef __cplusplus
}
#endif

#endif /* NNLFT_H */
