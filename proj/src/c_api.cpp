// SPDX-License-Identifier: Apache-2.0

#define NNLFT_BUILDING_DLL

#include "nnlft/nnlft.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <utility>

#include "nnlft/error.hpp"
#include "nnlft/eval_metrics.hpp"
#include "nnlft/grad_check.hpp"
#include "nnlft/ingest.hpp"
#include "nnlft/model_core.hpp"
#include "nnlft/solver.hpp"
#include "nnlft/tensor_store.hpp"

struct nnlft_tensor {
  nnlft::SparseTensor value;
};

struct nnlft_manifest {
  nnlft::IngestManifest value;
};

struct nnlft_split {
  nnlft::SplitAssignment value;
};

struct nnlft_model {
  nnlft::FactorState state;
  std::uint64_t seed = 0;
};

struct nnlft_trace {
  nnlft::TrainTrace value;
};

namespace {

thread_local std::string last_error;

nnlft_status fail(nnlft_status status, const char* what) {
  last_error = what;
  return status;
}

template <typename Fn>
nnlft_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return NNLFT_OK;
  } catch (const nnlft::ConfigError& e) {
    return fail(NNLFT_ERR_CONFIG, e.what());
  } catch (const nnlft::DataError& e) {
    return fail(NNLFT_ERR_DATA, e.what());
  } catch (const nnlft::DivergenceError& e) {
    return fail(NNLFT_ERR_DIVERGENCE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NNLFT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NNLFT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NNLFT_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) throw nnlft::ConfigError(std::string(name) + " must not be NULL");
}

nnlft::TensorShape to_shape(const size_t dims[3]) { return {dims[0], dims[1], dims[2]}; }

nnlft::DuplicatePolicy to_policy(nnlft_duplicate_policy policy) {
  switch (policy) {
    case NNLFT_DUP_MEAN: return nnlft::DuplicatePolicy::Mean;
    case NNLFT_DUP_LAST_WINS: return nnlft::DuplicatePolicy::LastWins;
  }
  throw nnlft::ConfigError("unknown duplicate policy");
}

nnlft::TrainConfig to_config(const nnlft_train_config& c) {
  nnlft::TrainConfig config;
  config.rank = c.rank;
  config.eta = c.eta;
  config.lambda = c.lambda;
  config.gamma = c.gamma;
  config.max_epochs = c.max_epochs;
  config.patience = c.patience;
  config.min_improvement = c.min_improvement;
  config.seed = c.seed;
  switch (c.reg_mode) {
    case NNLFT_REG_EXACT: config.reg_mode = nnlft::RegMode::Exact; break;
    case NNLFT_REG_RAW_Y: config.reg_mode = nnlft::RegMode::RawY; break;
    default: throw nnlft::ConfigError("unknown reg mode");
  }
  config.init_scale = c.init_scale;
  config.validate();
  return config;
}

const std::vector<std::size_t>& subset_of(const nnlft::SplitAssignment& split, nnlft_subset subset) {
  switch (subset) {
    case NNLFT_SUBSET_TRAIN: return split.train;
    case NNLFT_SUBSET_VALIDATION: return split.validation;
    case NNLFT_SUBSET_TEST: return split.test;
    default: throw nnlft::ConfigError("subset must be train, validation or test");
  }
}

void copy_out(const std::string& text, char* buffer, size_t len) {
  if (buffer == nullptr || len == 0) return;
  const size_t n = std::min(len - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
}

}  // namespace

extern "C" {

const char* nnlft_last_error(void) { return last_error.c_str(); }

const char* nnlft_version(void) { return "1.0.0"; }

nnlft_status nnlft_tensor_create(const size_t dims[3], nnlft_tensor** out) {
  return guarded([&] {
    require(dims, "dims");
    require(out, "out");
    *out = new nnlft_tensor{nnlft::SparseTensor(to_shape(dims))};
  });
}

nnlft_status nnlft_tensor_load(const char* path, nnlft_tensor** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new nnlft_tensor{nnlft::load_tensor(path)};
  });
}

nnlft_status nnlft_tensor_save(const nnlft_tensor* tensor, const char* path) {
  return guarded([&] {
    require(tensor, "tensor");
    require(path, "path");
    nnlft::save_tensor(path, tensor->value);
  });
}

void nnlft_tensor_free(nnlft_tensor* tensor) { delete tensor; }

nnlft_status nnlft_tensor_insert(nnlft_tensor* tensor, uint32_t i, uint32_t j, uint32_t k, double value,
                                 nnlft_duplicate_policy policy) {
  return guarded([&] {
    require(tensor, "tensor");
    tensor->value.insert_or_merge({i, j, k, value}, to_policy(policy));
  });
}

void nnlft_tensor_shape(const nnlft_tensor* tensor, size_t dims[3]) {
  const auto& s = tensor->value.shape();
  dims[0] = s.dim_i;
  dims[1] = s.dim_j;
  dims[2] = s.dim_k;
}

size_t nnlft_tensor_size(const nnlft_tensor* tensor) { return tensor->value.size(); }

double nnlft_tensor_density(const nnlft_tensor* tensor) { return nnlft::density(tensor->value); }

nnlft_status nnlft_tensor_entry(const nnlft_tensor* tensor, size_t n, uint32_t* i, uint32_t* j, uint32_t* k,
                                double* value) {
  return guarded([&] {
    require(tensor, "tensor");
    if (n >= tensor->value.size()) throw nnlft::BoundsError("entry position out of range");
    const auto& e = tensor->value[n];
    if (i) *i = e.i;
    if (j) *j = e.j;
    if (k) *k = e.k;
    if (value) *value = e.value;
  });
}

nnlft_status nnlft_ingest_file(const char* edge_list_path, char delimiter, size_t k_slots,
                               nnlft_duplicate_policy policy, nnlft_tensor** tensor_out,
                               nnlft_manifest** manifest_out) {
  return guarded([&] {
    require(edge_list_path, "edge_list_path");
    require(tensor_out, "tensor_out");
    std::ifstream in(edge_list_path, std::ios::binary);
    if (!in) throw nnlft::DataError(std::string("cannot open ") + edge_list_path);
    auto result = nnlft::build_tensor(nnlft::parse_edge_list(in, delimiter), k_slots, to_policy(policy));
    auto tensor = std::make_unique<nnlft_tensor>(nnlft_tensor{std::move(result.tensor)});
    if (manifest_out) *manifest_out = new nnlft_manifest{std::move(result.manifest)};
    *tensor_out = tensor.release();
  });
}

nnlft_status nnlft_manifest_save(const nnlft_manifest* manifest, const char* dir) {
  return guarded([&] {
    require(manifest, "manifest");
    require(dir, "dir");
    nnlft::save_manifest(dir, manifest->value);
  });
}

size_t nnlft_manifest_record_count(const nnlft_manifest* manifest) { return manifest->value.record_count; }

void nnlft_manifest_free(nnlft_manifest* manifest) { delete manifest; }

nnlft_status nnlft_synth(const size_t dims[3], size_t true_rank, size_t n_entries, double noise_sd, uint64_t seed,
                         nnlft_tensor** tensor_out, nnlft_model** truth_out) {
  return guarded([&] {
    require(dims, "dims");
    require(tensor_out, "tensor_out");
    auto result = nnlft::synth_tensor(to_shape(dims), true_rank, n_entries, noise_sd, seed);
    auto tensor = std::make_unique<nnlft_tensor>(nnlft_tensor{std::move(result.tensor)});
    if (truth_out) *truth_out = new nnlft_model{std::move(result.truth), seed};
    *tensor_out = tensor.release();
  });
}

nnlft_status nnlft_split_create(const nnlft_tensor* tensor, const double ratios[3], uint64_t seed,
                                nnlft_split** out) {
  return guarded([&] {
    require(tensor, "tensor");
    require(ratios, "ratios");
    require(out, "out");
    *out = new nnlft_split{nnlft::split(tensor->value, {ratios[0], ratios[1], ratios[2]}, seed)};
  });
}

void nnlft_split_free(nnlft_split* split) { delete split; }

void nnlft_split_sizes(const nnlft_split* split, size_t sizes[3]) {
  sizes[0] = split->value.train.size();
  sizes[1] = split->value.validation.size();
  sizes[2] = split->value.test.size();
}

nnlft_status nnlft_split_indices(const nnlft_split* split, nnlft_subset subset, const size_t** data, size_t* count) {
  return guarded([&] {
    require(split, "split");
    const auto& positions = subset_of(split->value, subset);
    if (data) *data = positions.data();
    if (count) *count = positions.size();
  });
}

void nnlft_train_config_init(nnlft_train_config* config) {
  const nnlft::TrainConfig defaults;
  config->rank = defaults.rank;
  config->eta = defaults.eta;
  config->lambda = defaults.lambda;
  config->gamma = defaults.gamma;
  config->max_epochs = defaults.max_epochs;
  config->patience = defaults.patience;
  config->min_improvement = defaults.min_improvement;
  config->seed = defaults.seed;
  config->reg_mode = NNLFT_REG_EXACT;
  config->init_scale = defaults.init_scale;
  config->update_rule = NNLFT_RULE_MOMENTUM;
}

nnlft_status nnlft_train(const nnlft_tensor* tensor, const nnlft_split* split, const nnlft_train_config* config,
                         nnlft_epoch_fn observer, void* user, nnlft_model** model_out, nnlft_trace** trace_out) {
  return guarded([&] {
    require(tensor, "tensor");
    require(split, "split");
    require(config, "config");
    const auto cfg = to_config(*config);
    const auto rule =
        config->update_rule == NNLFT_RULE_PLAIN_SGD ? nnlft::UpdateRule::PlainSgd : nnlft::UpdateRule::Momentum;
    nnlft::EpochObserver watch;
    if (observer) {
      watch = [observer, user](int epoch, const nnlft::FactorState& s) {
        const size_t dims[3] = {s.i.rows(), s.j.rows(), s.k.rows()};
        observer(epoch, s.i.values().data(), s.j.values().data(), s.k.values().data(), dims, s.rank(), user);
      };
    }
    auto result = nnlft::train(tensor->value, split->value, cfg, rule, watch);
    auto trace = std::make_unique<nnlft_trace>(nnlft_trace{std::move(result.trace)});
    if (model_out) *model_out = new nnlft_model{std::move(result.best_state), cfg.seed};
    if (trace_out) *trace_out = trace.release();
  });
}

void nnlft_trace_free(nnlft_trace* trace) { delete trace; }

size_t nnlft_trace_epochs(const nnlft_trace* trace) { return trace->value.epochs.size(); }

nnlft_status nnlft_trace_record(const nnlft_trace* trace, size_t n, int* epoch, double* train_loss,
                                double* val_rmse) {
  return guarded([&] {
    require(trace, "trace");
    if (n >= trace->value.epochs.size()) throw nnlft::BoundsError("trace record out of range");
    const auto& rec = trace->value.epochs[n];
    if (epoch) *epoch = rec.epoch;
    if (train_loss) *train_loss = rec.train_loss;
    if (val_rmse) *val_rmse = rec.val_rmse;
  });
}

void nnlft_trace_best(const nnlft_trace* trace, int* epoch, double* val_rmse) {
  if (epoch) *epoch = trace->value.best_epoch;
  if (val_rmse) *val_rmse = trace->value.best_val_rmse;
}

nnlft_stop_reason nnlft_trace_stop_reason(const nnlft_trace* trace) {
  return trace->value.stopped == nnlft::StopReason::Patience ? NNLFT_STOP_PATIENCE : NNLFT_STOP_MAX_EPOCHS;
}

nnlft_status nnlft_trace_write_csv(const nnlft_trace* trace, const char* path) {
  return guarded([&] {
    require(trace, "trace");
    require(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nnlft::DataError(std::string("cannot open ") + path + " for writing");
    nnlft::write_trace_csv(out, trace->value);
  });
}

nnlft_status nnlft_model_load(const char* path, nnlft_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto saved = nnlft::load_model(path);
    *out = new nnlft_model{std::move(saved.state), saved.seed};
  });
}

nnlft_status nnlft_model_save(const nnlft_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    nnlft::save_model(path, model->state, model->seed);
  });
}

void nnlft_model_free(nnlft_model* model) { delete model; }

void nnlft_model_shape(const nnlft_model* model, size_t dims[3], size_t* rank) {
  if (dims) {
    dims[0] = model->state.i.rows();
    dims[1] = model->state.j.rows();
    dims[2] = model->state.k.rows();
  }
  if (rank) *rank = model->state.rank();
}

uint64_t nnlft_model_seed(const nnlft_model* model) { return model->seed; }

nnlft_status nnlft_model_predict(const nnlft_model* model, uint32_t i, uint32_t j, uint32_t k, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = nnlft::predict(model->state, i, j, k);
  });
}

nnlft_status nnlft_evaluate(const nnlft_model* model, const nnlft_tensor* tensor, const nnlft_split* split,
                            nnlft_subset subset, double* rmse, double* mae, size_t* count) {
  return guarded([&] {
    require(model, "model");
    require(tensor, "tensor");
    if (model->state.shape() != tensor->value.shape()) {
      throw nnlft::DataError("model shape does not match tensor shape");
    }
    std::vector<nnlft::Entry> entries;
    if (subset == NNLFT_SUBSET_ALL) {
      entries.assign(tensor->value.entries().begin(), tensor->value.entries().end());
    } else {
      require(split, "split");
      entries = nnlft::gather(tensor->value, subset_of(split->value, subset));
    }
    const auto report = nnlft::evaluate(model->state, entries, "");
    if (rmse) *rmse = report.rmse;
    if (mae) *mae = report.mae;
    if (count) *count = report.entry_count;
  });
}

nnlft_status nnlft_compare_runs(const char* const* labels, const nnlft_trace* const* traces, size_t count,
                                const char* csv_path, size_t* order_out) {
  return guarded([&] {
    if (count == 0) throw nnlft::ConfigError("no traces to compare");
    require(labels, "labels");
    require(traces, "traces");
    std::vector<std::pair<std::string, nnlft::TrainTrace>> runs;
    runs.reserve(count);
    for (size_t n = 0; n < count; ++n) {
      require(labels[n], "label");
      require(traces[n], "trace");
      // Position suffix lets the input order be recovered after sorting.
      runs.emplace_back(std::to_string(n), traces[n]->value);
    }
    auto rows = nnlft::compare_runs(runs);
    if (order_out) {
      for (size_t n = 0; n < rows.size(); ++n) order_out[n] = std::stoul(rows[n].label);
    }
    for (auto& row : rows) row.label = labels[std::stoul(row.label)];
    if (csv_path) {
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) throw nnlft::DataError(std::string("cannot open ") + csv_path + " for writing");
      nnlft::write_report_csv(out, rows);
    }
  });
}

void nnlft_grad_check_options_init(nnlft_grad_check_options* options) {
  const nnlft::GradCheckOptions defaults;
  options->samples = defaults.samples;
  options->seed = defaults.seed;
  options->lambda_max = defaults.lambda_max;
  options->zero_lambda = 0;
  options->variant = NNLFT_GRAD_EXACT;
}

nnlft_status nnlft_grad_check(const nnlft_grad_check_options* options, nnlft_grad_check_result* result,
                              char* worst_case, size_t worst_case_len) {
  return guarded([&] {
    require(options, "options");
    require(result, "result");
    if (options->samples == 0) throw nnlft::ConfigError("grad-check needs at least one sample");
    if (!(options->lambda_max >= 0.0)) throw nnlft::ConfigError("lambda_max must be >= 0");
    nnlft::GradCheckOptions opts;
    opts.samples = options->samples;
    opts.seed = options->seed;
    opts.lambda_max = options->lambda_max;
    opts.zero_lambda = options->zero_lambda != 0;

    nnlft::GradientFn gradient;
    switch (options->variant) {
      case NNLFT_GRAD_EXACT: break;
      case NNLFT_GRAD_FLIPPED_SIGN:
        gradient = [](const nnlft::FactorState& s, const nnlft::Entry& e, double lambda) {
          auto g = nnlft::point_gradient(s, e, lambda);
          for (auto* v : {&g.y_i, &g.y_j, &g.y_k}) {
            for (double& x : *v) x = -x;
          }
          return g;
        };
        break;
      case NNLFT_GRAD_RAW_Y:
        gradient = [](const nnlft::FactorState& s, const nnlft::Entry& e, double lambda) {
          return nnlft::point_gradient(s, e, lambda, nnlft::RegMode::RawY);
        };
        break;
      default: throw nnlft::ConfigError("unknown gradient variant");
    }

    const auto report = nnlft::grad_check(opts, gradient);
    result->samples = report.samples;
    result->components = report.components;
    result->max_rel_error = report.max_rel_error;
    result->tolerance = opts.tolerance;
    result->passed = report.passed ? 1 : 0;
    std::ostringstream desc;
    nnlft::describe_case(desc, report.worst);
    copy_out(desc.str(), worst_case, worst_case_len);
  });
}

}  // extern "C"
