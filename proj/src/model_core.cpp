// SPDX-License-Identifier: Apache-2.0

#include "nnlft/model_core.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "nnlft/error.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

const char* to_string(RegMode mode) noexcept { return mode == RegMode::Exact ? "eq6-exact" : "raw-y"; }

RegMode parse_reg_mode(std::string_view text) {
  if (text == "eq6-exact" || text == "exact") return RegMode::Exact;
  if (text == "raw-y") return RegMode::RawY;
  throw ConfigError("unknown reg mode '" + std::string(text) + "' (expected eq6-exact or raw-y)");
}

void check_bounds(const FactorState& state, Index i, Index j, Index k) {
  if (i >= state.i.rows() || j >= state.j.rows() || k >= state.k.rows()) {
    throw BoundsError("index (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) +
                      ") outside model shape");
  }
}

double predict(const FactorState& state, Index i, Index j, Index k) {
  check_bounds(state, i, j, k);
  const auto yi = state.i.row(i);
  const auto yj = state.j.row(j);
  const auto yk = state.k.row(k);
  double sum = 0.0;
  for (std::size_t r = 0; r < yi.size(); ++r) sum += sigmoid(yi[r]) * sigmoid(yj[r]) * sigmoid(yk[r]);
  return sum;
}

LossBreakdown loss(const FactorState& state, std::span<const Entry> entries, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  LossBreakdown out;
  double penalty = 0.0;
  for (const auto& e : entries) {
    const double err = residual(state, e);
    out.data_term += err * err;
    if (lambda > 0.0) {
      const auto yi = state.i.row(e.i);
      const auto yj = state.j.row(e.j);
      const auto yk = state.k.row(e.k);
      for (std::size_t r = 0; r < yi.size(); ++r) {
        const double xi = sigmoid(yi[r]), xj = sigmoid(yj[r]), xk = sigmoid(yk[r]);
        penalty += xi * xi + xj * xj + xk * xk;
      }
    }
  }
  out.data_term *= 0.5;
  out.reg_term = 0.5 * lambda * penalty;
  out.total = out.data_term + out.reg_term;
  return out;
}

void point_gradient(const FactorState& state, const Entry& entry, double lambda, RegMode mode,
                    std::span<double> grad_i, std::span<double> grad_j, std::span<double> grad_k) {
  const double err = residual(state, entry);
  const auto yi = state.i.row(entry.i);
  const auto yj = state.j.row(entry.j);
  const auto yk = state.k.row(entry.k);
  for (std::size_t r = 0; r < yi.size(); ++r) {
    const double xi = sigmoid(yi[r]), xj = sigmoid(yj[r]), xk = sigmoid(yk[r]);
    const double reg_i = mode == RegMode::Exact ? xi : yi[r];
    const double reg_j = mode == RegMode::Exact ? xj : yj[r];
    const double reg_k = mode == RegMode::Exact ? xk : yk[r];
    // d eps / d y = sigmoid'(y) * (-e * product of the other two factors + lambda * reg)
    grad_i[r] = xi * (1.0 - xi) * (-err * xj * xk + lambda * reg_i);
    grad_j[r] = xj * (1.0 - xj) * (-err * xi * xk + lambda * reg_j);
    grad_k[r] = xk * (1.0 - xk) * (-err * xi * xj + lambda * reg_k);
  }
}

PointGradient point_gradient(const FactorState& state, const Entry& entry, double lambda, RegMode mode) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  const auto rank = state.rank();
  PointGradient g{std::vector<double>(rank), std::vector<double>(rank), std::vector<double>(rank)};
  point_gradient(state, entry, lambda, mode, g.y_i, g.y_j, g.y_k);
  return g;
}

void write_model(std::ostream& out, const FactorState& state, std::uint64_t seed) {
  const auto shape = state.shape();
  out << "#factors\t" << shape.dim_i << '\t' << shape.dim_j << '\t' << shape.dim_k << '\t' << state.rank() << '\t'
      << seed << '\n';
  for (const FactorTable* table : {&state.i, &state.j, &state.k}) {
    for (std::size_t row = 0; row < table->rows(); ++row) {
      const auto values = table->row(row);
      for (std::size_t r = 0; r < values.size(); ++r) {
        if (r) out << '\t';
        out << text::format_double(values[r]);
      }
      out << '\n';
    }
  }
}

SavedModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty model file", line_no);
  const auto header = text::split_fields(text::trim(line), '\t');
  std::uint64_t dims[3], rank, seed;
  if (header.size() != 6 || header[0] != "#factors" || !text::parse_uint(header[1], dims[0]) ||
      !text::parse_uint(header[2], dims[1]) || !text::parse_uint(header[3], dims[2]) ||
      !text::parse_uint(header[4], rank) || !text::parse_uint(header[5], seed) || rank == 0 || dims[0] == 0 ||
      dims[1] == 0 || dims[2] == 0) {
    throw ParseError("expected '#factors<TAB>I<TAB>J<TAB>K<TAB>R<TAB>seed' header", line_no);
  }
  SavedModel model{FactorState(TensorShape{dims[0], dims[1], dims[2]}, rank), seed};
  for (FactorTable* table : {&model.state.i, &model.state.j, &model.state.k}) {
    for (std::size_t row = 0; row < table->rows(); ++row) {
      ++line_no;
      if (!std::getline(in, line)) throw ParseError("model file truncated", line_no);
      const auto fields = text::split_fields(text::trim(line), '\t');
      if (fields.size() != rank) throw ParseError("expected " + std::to_string(rank) + " values", line_no);
      auto values = table->row(row);
      for (std::size_t r = 0; r < rank; ++r) {
        if (!text::parse_double(fields[r], values[r]) || !std::isfinite(values[r])) {
          throw ParseError("bad parameter value", line_no);
        }
      }
    }
  }
  return model;
}

void save_model(const std::filesystem::path& path, const FactorState& state, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_model(out, state, seed);
  if (!out) throw DataError("failed writing " + path.string());
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_model(in);
}

}  // namespace nnlft
