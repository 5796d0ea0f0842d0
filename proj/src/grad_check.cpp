// SPDX-License-Identifier: Apache-2.0

#include "nnlft/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nnlft/random.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

namespace {

using Wide = long double;

Wide wide_sigmoid(Wide a) { return 1.0L / (1.0L + std::exp(-a)); }

// Single-entry objective, evaluated from scratch in extended precision so the
// central difference is not dominated by double rounding.
Wide entry_objective(std::span<const Wide> yi, std::span<const Wide> yj, std::span<const Wide> yk, Wide target,
                     Wide lambda) {
  Wide prediction = 0.0L;
  Wide penalty = 0.0L;
  for (std::size_t r = 0; r < yi.size(); ++r) {
    const Wide xi = wide_sigmoid(yi[r]), xj = wide_sigmoid(yj[r]), xk = wide_sigmoid(yk[r]);
    prediction += xi * xj * xk;
    penalty += xi * xi + xj * xj + xk * xk;
  }
  const Wide err = target - prediction;
  return 0.5L * err * err + 0.5L * lambda * penalty;
}

std::vector<Wide> widen(std::span<const double> values) { return {values.begin(), values.end()}; }

}  // namespace

GradCheckReport grad_check(const GradCheckOptions& options, const GradientFn& gradient) {
  const GradientFn analytic = gradient ? gradient : [](const FactorState& s, const Entry& e, double lambda) {
    return point_gradient(s, e, lambda);
  };

  GradCheckReport report;
  report.samples = options.samples;
  Rng rng(derive_seed(options.seed, 0x62AD));
  const TensorShape shape{3, 3, 3};

  for (std::size_t sample = 0; sample < options.samples; ++sample) {
    const std::size_t rank = 1 + static_cast<std::size_t>(rng.below(options.max_rank));
    FactorState state(shape, rank);
    for (FactorTable* table : {&state.i, &state.j, &state.k}) {
      for (double& y : table->values()) y = rng.uniform(-options.param_range, options.param_range);
    }
    Entry entry{static_cast<Index>(rng.below(shape.dim_i)), static_cast<Index>(rng.below(shape.dim_j)),
                static_cast<Index>(rng.below(shape.dim_k)), rng.uniform()};
    const double lambda = options.zero_lambda ? 0.0 : rng.uniform(0.0, options.lambda_max);

    const PointGradient g = analytic(state, entry, lambda);
    std::vector<Wide> rows[3] = {widen(state.i.row(entry.i)), widen(state.j.row(entry.j)),
                                 widen(state.k.row(entry.k))};
    const std::vector<double>* grads[3] = {&g.y_i, &g.y_j, &g.y_k};
    const Wide h = options.step;

    for (std::size_t mode = 0; mode < 3; ++mode) {
      for (std::size_t r = 0; r < rank; ++r) {
        const Wide saved = rows[mode][r];
        rows[mode][r] = saved + h;
        const Wide up = entry_objective(rows[0], rows[1], rows[2], entry.value, lambda);
        rows[mode][r] = saved - h;
        const Wide down = entry_objective(rows[0], rows[1], rows[2], entry.value, lambda);
        rows[mode][r] = saved;

        const double numeric = static_cast<double>((up - down) / (2.0L * h));
        const double value = (*grads[mode])[r];
        const double diff = std::abs(value - numeric);
        const double magnitude = std::max(std::abs(value), std::abs(numeric));
        ++report.components;
        double rel = 0.0;
        if (magnitude < options.abs_floor) {
          // Near-zero component: only the absolute floor applies.
          ++report.near_zero;
          if (diff > options.abs_floor) report.floor_violations++;
        } else {
          rel = diff / magnitude;
        }
        if (report.components == 1 || rel > report.max_rel_error) {
          report.max_rel_error = std::max(report.max_rel_error, rel);
          report.worst = {state, entry, lambda, "ijk"[mode], r, value, numeric};
        }
      }
    }
  }
  report.passed = report.max_rel_error <= options.tolerance && report.floor_violations == 0;
  return report;
}

void describe_case(std::ostream& out, const GradCheckCase& c) {
  out << "entry (" << c.entry.i << "," << c.entry.j << "," << c.entry.k
      << ") value=" << text::format_double(c.entry.value) << " lambda=" << text::format_double(c.lambda)
      << " rank=" << c.state.rank() << '\n'
      << "component y_" << c.mode << "[" << c.component << "]: analytic=" << text::format_double(c.analytic)
      << " finite-difference=" << text::format_double(c.numeric) << '\n';
  const FactorTable* tables[3] = {&c.state.i, &c.state.j, &c.state.k};
  const Index rows[3] = {c.entry.i, c.entry.j, c.entry.k};
  for (int m = 0; m < 3; ++m) {
    out << "y_" << "ijk"[m] << " row:";
    for (double y : tables[m]->row(rows[m])) out << ' ' << text::format_double(y);
    out << '\n';
  }
}

}  // namespace nnlft
