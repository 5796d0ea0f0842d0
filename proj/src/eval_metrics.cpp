// SPDX-License-Identifier: Apache-2.0

#include "nnlft/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "nnlft/error.hpp"
#include "nnlft/random.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

namespace {

constexpr std::uint64_t kTruthStream = 0x7247;
constexpr std::uint64_t kCellStream = 0xCE11;
constexpr std::uint64_t kNoiseStream = 0x4015E;

}  // namespace

double rmse(const FactorState& state, std::span<const Entry> entries) {
  if (entries.empty()) throw EvalError("RMSE over an empty entry set");
  double sum = 0.0;
  for (const auto& e : entries) {
    const double err = residual(state, e);
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(entries.size()));
}

double mae(const FactorState& state, std::span<const Entry> entries) {
  if (entries.empty()) throw EvalError("MAE over an empty entry set");
  double sum = 0.0;
  for (const auto& e : entries) sum += std::abs(residual(state, e));
  return sum / static_cast<double>(entries.size());
}

EvalReport evaluate(const FactorState& state, std::span<const Entry> entries, std::string split_name) {
  return {rmse(state, entries), mae(state, entries), entries.size(), std::move(split_name)};
}

SynthResult synth_tensor(const TensorShape& dims, std::size_t true_rank, std::size_t n_entries, double noise_sd,
                         std::uint64_t seed) {
  if (true_rank < 1) throw ConfigError("true_rank must be >= 1");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0");
  SparseTensor tensor(dims);
  if (static_cast<double>(n_entries) > dims.volume()) {
    throw ConfigError("cannot sample " + std::to_string(n_entries) + " distinct cells from a tensor of volume " +
                      text::format_double(dims.volume()));
  }

  FactorState truth(dims, true_rank);
  Rng truth_rng(derive_seed(seed, kTruthStream));
  for (FactorTable* table : {&truth.i, &truth.j, &truth.k}) {
    for (double& y : table->values()) y = truth_rng.uniform(-1.0, 1.0);
  }

  const auto volume = static_cast<std::uint64_t>(dims.volume());
  const auto cell_entry = [&](std::uint64_t cell) {
    const auto k = static_cast<Index>(cell % dims.dim_k);
    const auto j = static_cast<Index>((cell / dims.dim_k) % dims.dim_j);
    const auto i = static_cast<Index>(cell / (dims.dim_k * dims.dim_j));
    return Entry{i, j, k, 0.0};
  };

  std::vector<Entry> cells;
  cells.reserve(n_entries);
  Rng cell_rng(derive_seed(seed, kCellStream));
  if (2 * n_entries > volume) {
    // Dense request: partial Fisher-Yates over every cell id.
    std::vector<std::uint64_t> ids(volume);
    std::iota(ids.begin(), ids.end(), std::uint64_t{0});
    for (std::size_t n = 0; n < n_entries; ++n) {
      const auto pick = n + static_cast<std::size_t>(cell_rng.below(volume - n));
      std::swap(ids[n], ids[pick]);
      cells.push_back(cell_entry(ids[n]));
    }
  } else {
    SparseTensor seen(dims);
    while (cells.size() < n_entries) {
      const auto e = cell_entry(cell_rng.below(volume));
      if (seen.contains(e.i, e.j, e.k)) continue;
      seen.insert_or_merge(e);
      cells.push_back(e);
    }
  }

  Rng noise_rng(derive_seed(seed, kNoiseStream));
  const double scale = 1.0 / static_cast<double>(true_rank);
  for (auto& e : cells) {
    double value = predict(truth, e.i, e.j, e.k) * scale;
    if (noise_sd > 0.0) value = std::clamp(value + noise_sd * noise_rng.normal(), 0.0, 1.0);
    e.value = value;
    tensor.insert_or_merge(e);
  }
  return {std::move(tensor), std::move(truth)};
}

std::vector<ComparisonRow> compare_runs(std::span<const std::pair<std::string, TrainTrace>> traces) {
  std::vector<ComparisonRow> rows;
  rows.reserve(traces.size());
  for (const auto& [label, trace] : traces) rows.push_back({label, trace.best_val_rmse, trace.best_epoch});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.best_rmse < b.best_rmse; });
  return rows;
}

void write_report_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "label,best_rmse,epochs_to_best\n";
  for (const auto& row : rows) {
    out << row.label << ',' << text::format_double(row.best_rmse) << ',' << row.epochs_to_best << '\n';
  }
}

}  // namespace nnlft
