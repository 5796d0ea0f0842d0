// SPDX-License-Identifier: Apache-2.0

// Randomized comparison of point_gradient against central finite differences
// of the single-entry objective.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "nnlft/model_core.hpp"

namespace nnlft {

using GradientFn = std::function<PointGradient(const FactorState&, const Entry&, double lambda)>;

struct GradCheckOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double lambda_max = 0.1;
  /// Sample lambda = 0 only.
  bool zero_lambda = false;
  std::size_t max_rank = 8;
  double param_range = 3.0;
  double step = 1e-6;
  double tolerance = 1e-6;
  // Components with |analytic| and |numeric| both below this are checked
  // against it as an absolute error instead of relatively.
  double abs_floor = 1e-9;
};

struct GradCheckCase {
  FactorState state;
  Entry entry;
  double lambda = 0.0;
  char mode = 'i';
  std::size_t component = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::size_t samples = 0;
  std::size_t components = 0;
  std::size_t near_zero = 0;
  std::size_t floor_violations = 0;
  double max_rel_error = 0.0;
  bool passed = false;
  GradCheckCase worst;
};

/// Checks `gradient` (point_gradient when empty) on randomly drawn states,
/// entries and lambdas.
GradCheckReport grad_check(const GradCheckOptions& options, const GradientFn& gradient = {});

/// Full inputs of the worst case, for failure diagnostics.
void describe_case(std::ostream& out, const GradCheckCase& c);

}  // namespace nnlft
