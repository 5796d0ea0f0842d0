// SPDX-License-Identifier: Apache-2.0

// Sigmoid-reparameterized CP model.
//
// Each latent factor x is produced from an unconstrained decision parameter y
// as x = sigmoid(y), so every factor stays strictly positive without any
// projection step. A known cell is approximated by
//
//   a_ijk ~ sum_r sigmoid(y_ir) * sigmoid(y_jr) * sigmoid(y_kr)
//
// and the per-entry objective is
//
//   eps_ijk = 1/2 * (a_ijk - prediction)^2
//           + 1/2 * lambda * sum_r (sigmoid^2(y_ir) + sigmoid^2(y_jr) + sigmoid^2(y_kr)).
//
// The regularizer sits inside the sum over known entries, so a row is
// penalized once for every observation it participates in.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nnlft/tensor_store.hpp"

namespace nnlft {

inline double sigmoid(double alpha) noexcept {
  if (alpha >= 0.0) return 1.0 / (1.0 + std::exp(-alpha));
  const double e = std::exp(alpha);
  return e / (1.0 + e);
}

/// sigmoid'(alpha) = sigmoid(alpha) * (1 - sigmoid(alpha)), in (0, 0.25].
/// Evaluated from the small tail so that it is exactly even in alpha.
inline double sigmoid_derivative(double alpha) noexcept {
  const double s = sigmoid(-std::abs(alpha));
  return s * (1.0 - s);
}

/// Row-major rows x rank table of decision parameters.
class FactorTable {
 public:
  FactorTable() = default;
  FactorTable(std::size_t rows, std::size_t rank) : rows_(rows), rank_(rank), data_(rows * rank, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t rank() const noexcept { return rank_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * rank_, rank_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * rank_, rank_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const FactorTable&, const FactorTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t rank_ = 0;
  std::vector<double> data_;
};

/// Decision parameters for the three modes. Non-negative factors are the
/// derived view sigmoid(y).
struct FactorState {
  FactorTable i;
  FactorTable j;
  FactorTable k;

  FactorState() = default;
  FactorState(const TensorShape& shape, std::size_t rank)
      : i(shape.dim_i, rank), j(shape.dim_j, rank), k(shape.dim_k, rank) {}

  std::size_t rank() const noexcept { return i.rank(); }
  TensorShape shape() const noexcept { return {i.rows(), j.rows(), k.rows()}; }

  friend bool operator==(const FactorState&, const FactorState&) = default;
};

/// Selects the regularization term inside the per-parameter gradient.
enum class RegMode {
  /// Exact derivative of the sigmoid-squared penalty: lambda * sigmoid(y).
  Exact,
  /// lambda * y in place of lambda * sigmoid(y), kept for comparison runs.
  RawY,
};

const char* to_string(RegMode mode) noexcept;
RegMode parse_reg_mode(std::string_view text);

struct LossBreakdown {
  double data_term = 0.0;
  double reg_term = 0.0;
  double total = 0.0;
};

struct PointGradient {
  std::vector<double> y_i;
  std::vector<double> y_j;
  std::vector<double> y_k;
};

/// Throws BoundsError if (i, j, k) lies outside the state's shape.
void check_bounds(const FactorState& state, Index i, Index j, Index k);

double predict(const FactorState& state, Index i, Index j, Index k);

inline double residual(const FactorState& state, const Entry& entry) {
  return entry.value - predict(state, entry.i, entry.j, entry.k);
}

/// Regularized squared-error objective over `entries`. Throws ConfigError for
/// negative lambda.
LossBreakdown loss(const FactorState& state, std::span<const Entry> entries, double lambda);

/// Gradient of the single-entry objective with respect to the 3R parameters
/// the entry touches. With RegMode::RawY the result is no longer the gradient
/// of `loss`.
PointGradient point_gradient(const FactorState& state, const Entry& entry, double lambda,
                             RegMode mode = RegMode::Exact);

/// Allocation-free form used by the solver. Each output span has length R.
void point_gradient(const FactorState& state, const Entry& entry, double lambda, RegMode mode,
                    std::span<double> grad_i, std::span<double> grad_j, std::span<double> grad_k);

// Model file: "#factors\tI\tJ\tK\tR\tseed", then the I rows, J rows and K rows,
// one tab-separated line of R values each.
struct SavedModel {
  FactorState state;
  std::uint64_t seed = 0;
};

void write_model(std::ostream& out, const FactorState& state, std::uint64_t seed);
SavedModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const FactorState& state, std::uint64_t seed);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace nnlft
