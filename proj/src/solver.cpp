// SPDX-License-Identifier: Apache-2.0

#include "nnlft/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nnlft/error.hpp"
#include "nnlft/eval_metrics.hpp"
#include "nnlft/random.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

namespace {

constexpr std::uint64_t kInitStream = 0x1D17;
constexpr std::uint64_t kShuffleStream = 0x5EED0000;

struct Gradients {
  std::vector<double> buffer;
  std::span<double> i, j, k;

  explicit Gradients(std::size_t rank) : buffer(3 * rank) {
    i = {buffer.data(), rank};
    j = {buffer.data() + rank, rank};
    k = {buffer.data() + 2 * rank, rank};
  }
};

Gradients& scratch(std::size_t rank) {
  thread_local Gradients g(0);
  if (g.i.size() != rank) g = Gradients(rank);
  return g;
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

[[noreturn]] void diverged(const Entry& entry, int epoch, std::size_t entry_index, const char* what) {
  std::ostringstream msg;
  msg << "non-finite " << what << " after update on entry #" << entry_index << " (" << entry.i << "," << entry.j
      << "," << entry.k << ", value " << entry.value << ") in epoch " << epoch;
  throw DivergenceError(msg.str(), entry_index, epoch);
}

}  // namespace

void TrainConfig::validate() const {
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(min_improvement >= 0.0)) throw ConfigError("min_improvement must be >= 0");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw ConfigError("init_scale must be > 0");
}

const char* to_string(StopReason reason) noexcept {
  return reason == StopReason::Patience ? "patience" : "max_epochs";
}

FactorState init_factors(const TensorShape& shape, const TrainConfig& config) {
  FactorState state(shape, config.rank);
  Rng rng(derive_seed(config.seed, kInitStream));
  for (FactorTable* table : {&state.i, &state.j, &state.k}) {
    for (double& y : table->values()) y = rng.uniform(-config.init_scale, config.init_scale);
  }
  return state;
}

void sgd_step(FactorState& state, const Entry& entry, const TrainConfig& config, int epoch,
              std::size_t entry_index) {
  auto& g = scratch(state.rank());
  point_gradient(state, entry, config.lambda, config.reg_mode, g.i, g.j, g.k);
  auto yi = state.i.row(entry.i);
  auto yj = state.j.row(entry.j);
  auto yk = state.k.row(entry.k);
  for (std::size_t r = 0; r < yi.size(); ++r) {
    yi[r] -= config.eta * g.i[r];
    yj[r] -= config.eta * g.j[r];
    yk[r] -= config.eta * g.k[r];
  }
  if (!all_finite(yi) || !all_finite(yj) || !all_finite(yk)) diverged(entry, epoch, entry_index, "parameter");
}

void msgd_step(FactorState& state, VelocityState& velocity, const Entry& entry, const TrainConfig& config,
               int epoch, std::size_t entry_index) {
  auto& g = scratch(state.rank());
  point_gradient(state, entry, config.lambda, config.reg_mode, g.i, g.j, g.k);
  auto yi = state.i.row(entry.i);
  auto yj = state.j.row(entry.j);
  auto yk = state.k.row(entry.k);
  auto vi = velocity.i.row(entry.i);
  auto vj = velocity.j.row(entry.j);
  auto vk = velocity.k.row(entry.k);
  for (std::size_t r = 0; r < yi.size(); ++r) {
    vi[r] = config.gamma * vi[r] + config.eta * g.i[r];
    vj[r] = config.gamma * vj[r] + config.eta * g.j[r];
    vk[r] = config.gamma * vk[r] + config.eta * g.k[r];
    yi[r] -= vi[r];
    yj[r] -= vj[r];
    yk[r] -= vk[r];
  }
  if (!all_finite(vi) || !all_finite(vj) || !all_finite(vk)) diverged(entry, epoch, entry_index, "velocity");
  if (!all_finite(yi) || !all_finite(yj) || !all_finite(yk)) diverged(entry, epoch, entry_index, "parameter");
}

TrainResult train(const SparseTensor& tensor, const SplitAssignment& split, const TrainConfig& config,
                  UpdateRule rule, const EpochObserver& observer) {
  config.validate();
  if (split.train.empty()) throw ConfigError("training split is empty");
  if (split.validation.empty()) throw ConfigError("validation split is empty");

  const auto train_entries = gather(tensor, split.train);
  const auto val_entries = gather(tensor, split.validation);

  FactorState state = init_factors(tensor.shape(), config);
  VelocityState velocity(tensor.shape(), config.rank);

  TrainResult result;
  auto& trace = result.trace;
  trace.best_val_rmse = std::numeric_limits<double>::infinity();
  double patience_ref = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  std::vector<std::size_t> order(train_entries.size());
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, kShuffleStream + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span<std::size_t>(order));

    for (auto n : order) {
      const Entry& entry = train_entries[n];
      if (rule == UpdateRule::Momentum) {
        msgd_step(state, velocity, entry, config, epoch, split.train[n]);
      } else {
        sgd_step(state, entry, config, epoch, split.train[n]);
      }
    }

    const EpochRecord record{epoch, loss(state, train_entries, config.lambda).total, rmse(state, val_entries)};
    trace.epochs.push_back(record);
    if (observer) observer(epoch, state);

    if (record.val_rmse < trace.best_val_rmse) {
      trace.best_val_rmse = record.val_rmse;
      trace.best_epoch = epoch;
      result.best_state = state;
    }
    if (record.val_rmse < patience_ref - config.min_improvement) {
      patience_ref = record.val_rmse;
      stale_epochs = 0;
    } else if (++stale_epochs >= config.patience) {
      trace.stopped = StopReason::Patience;
      return result;
    }
  }
  trace.stopped = StopReason::MaxEpochs;
  return result;
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
  out << "epoch,train_loss,val_rmse\n";
  for (const auto& rec : trace.epochs) {
    out << rec.epoch << ',' << text::format_double(rec.train_loss) << ',' << text::format_double(rec.val_rmse)
        << '\n';
  }
  out << "#best," << trace.best_epoch << ',' << text::format_double(trace.best_val_rmse) << '\n';
}

}  // namespace nnlft
