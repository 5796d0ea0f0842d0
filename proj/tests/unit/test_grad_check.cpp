// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "nnlft/grad_check.hpp"

using namespace nnlft;

TEST_CASE("exact gradient passes") {
  GradCheckOptions opts;
  const auto report = grad_check(opts);
  CHECK(report.passed);
  CHECK(report.samples == 1000);
  CHECK(report.components >= 3000);
  CHECK(report.max_rel_error <= 1e-6);
}

TEST_CASE("zero-lambda sweep passes") {
  GradCheckOptions opts;
  opts.zero_lambda = true;
  opts.seed = 17;
  const auto report = grad_check(opts);
  CHECK(report.passed);
  CHECK(report.worst.lambda == 0.0);
}

TEST_CASE("sign-flipped mutant fails with relative error near 2") {
  GradCheckOptions opts;
  opts.samples = 200;
  const auto report = grad_check(opts, [](const FactorState& s, const Entry& e, double lambda) {
    auto g = point_gradient(s, e, lambda);
    for (auto* v : {&g.y_i, &g.y_j, &g.y_k})
      for (double& x : *v) x = -x;
    return g;
  });
  CHECK_FALSE(report.passed);
  CHECK(report.max_rel_error == doctest::Approx(2.0).epsilon(1e-6));

  std::ostringstream desc;
  describe_case(desc, report.worst);
  CHECK(desc.str().find("analytic=") != std::string::npos);
  CHECK(desc.str().find("y_k row:") != std::string::npos);
}

TEST_CASE("raw-y regularization is not the gradient of the objective") {
  GradCheckOptions opts;
  opts.samples = 200;
  const auto raw = grad_check(opts, [](const FactorState& s, const Entry& e, double lambda) {
    return point_gradient(s, e, lambda, RegMode::RawY);
  });
  CHECK_FALSE(raw.passed);

  opts.zero_lambda = true;
  const auto raw_zero = grad_check(opts, [](const FactorState& s, const Entry& e, double lambda) {
    return point_gradient(s, e, lambda, RegMode::RawY);
  });
  CHECK(raw_zero.passed);
}
