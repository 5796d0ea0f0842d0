// SPDX-License-Identifier: Apache-2.0

// Per-entry stochastic training of the sigmoid CP model, with plain SGD and
// momentum SGD update rules.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nnlft/model_core.hpp"
#include "nnlft/tensor_store.hpp"

namespace nnlft {

struct TrainConfig {
  std::size_t rank = 20;
  double eta = 0.01;
  double lambda = 0.01;
  double gamma = 0.9;
  int max_epochs = 1000;
  int patience = 10;
  // Validation RMSE must drop by at least this much to reset patience.
  double min_improvement = 1e-5;
  std::uint64_t seed = 1;
  RegMode reg_mode = RegMode::Exact;
  double init_scale = 0.1;

  /// Throws ConfigError when any field is out of range.
  void validate() const;
};

/// Momentum velocities, one per decision parameter; shaped like FactorState.
using VelocityState = FactorState;

enum class UpdateRule { PlainSgd, Momentum };

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_rmse = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

enum class StopReason { Patience, MaxEpochs };

const char* to_string(StopReason reason) noexcept;

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_rmse = 0.0;
  StopReason stopped = StopReason::MaxEpochs;

  friend bool operator==(const TrainTrace&, const TrainTrace&) = default;
};

struct TrainResult {
  FactorState best_state;
  TrainTrace trace;
};

/// Uniform on [-init_scale, init_scale], filled I table, then J, then K.
FactorState init_factors(const TensorShape& shape, const TrainConfig& config);

/// y <- y - eta * g for the 3R parameters touched by `entry`. All gradients
/// are taken at the pre-step state. Throws DivergenceError on a non-finite
/// result; `epoch` and `entry_index` only label the diagnostic.
void sgd_step(FactorState& state, const Entry& entry, const TrainConfig& config,
              int epoch = 0, std::size_t entry_index = 0);

/// v <- gamma * v + eta * g; y <- y - v for the touched parameters.
void msgd_step(FactorState& state, VelocityState& velocity, const Entry& entry,
               const TrainConfig& config, int epoch = 0, std::size_t entry_index = 0);

/// Called after every epoch with the epoch number and the current
/// (not necessarily best) state.
using EpochObserver = std::function<void(int epoch, const FactorState& state)>;

/// Trains on split.train, early-stops on split.validation, and returns the
/// state snapshot of the best validation epoch.
TrainResult train(const SparseTensor& tensor, const SplitAssignment& split, const TrainConfig& config,
                  UpdateRule rule = UpdateRule::Momentum, const EpochObserver& observer = {});

// CSV: "epoch,train_loss,val_rmse" rows, then "#best,<epoch>,<val_rmse>".
void write_trace_csv(std::ostream& out, const TrainTrace& trace);

}  // namespace nnlft
