// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnlft/model_core.hpp"
#include "nnlft/solver.hpp"
#include "nnlft/tensor_store.hpp"

namespace nnlft {

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t entry_count = 0;
  std::string split_name;
};

/// sqrt(mean((a - a_hat)^2)). Throws EvalError on an empty sequence.
double rmse(const FactorState& state, std::span<const Entry> entries);
/// mean(|a - a_hat|). Throws EvalError on an empty sequence.
double mae(const FactorState& state, std::span<const Entry> entries);

EvalReport evaluate(const FactorState& state, std::span<const Entry> entries, std::string split_name);

struct SynthResult {
  SparseTensor tensor;
  FactorState truth;
};

/// Ground-truth recovery problem: a seeded rank-`true_rank` state with
/// parameters uniform on [-1, 1], and `n_entries` distinct cells valued
/// predict(truth)/true_rank plus Gaussian noise, clamped to [0, 1].
SynthResult synth_tensor(const TensorShape& dims, std::size_t true_rank, std::size_t n_entries,
                         double noise_sd, std::uint64_t seed);

struct ComparisonRow {
  std::string label;
  double best_rmse = 0.0;
  int epochs_to_best = 1;
};

/// One row per trace, ascending by best RMSE; ties keep input order.
std::vector<ComparisonRow> compare_runs(std::span<const std::pair<std::string, TrainTrace>> traces);

// CSV: "label,best_rmse,epochs_to_best".
void write_report_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace nnlft
