// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nnlft/error.hpp"
#include "nnlft/model_core.hpp"
#include "nnlft/random.hpp"

using namespace nnlft;

namespace {

FactorState zeros(std::size_t rank, TensorShape shape = {2, 2, 2}) { return FactorState(shape, rank); }

FactorState random_state(Rng& rng, TensorShape shape, std::size_t rank, double range) {
  FactorState s(shape, rank);
  for (FactorTable* t : {&s.i, &s.j, &s.k})
    for (double& y : t->values()) y = rng.uniform(-range, range);
  return s;
}

// Independent straight-line evaluation of the model and its single-entry
// objective, in extended precision.
long double oracle_sigmoid(long double a) { return 1.0L / (1.0L + std::exp(-a)); }

long double oracle_prediction(const FactorState& s, const Entry& e) {
  long double sum = 0.0L;
  for (std::size_t r = 0; r < s.rank(); ++r) {
    sum += oracle_sigmoid(s.i.row(e.i)[r]) * oracle_sigmoid(s.j.row(e.j)[r]) * oracle_sigmoid(s.k.row(e.k)[r]);
  }
  return sum;
}

long double oracle_objective(const FactorState& s, const Entry& e, double lambda) {
  const long double err = e.value - oracle_prediction(s, e);
  long double pen = 0.0L;
  for (std::size_t r = 0; r < s.rank(); ++r) {
    for (double y : {s.i.row(e.i)[r], s.j.row(e.j)[r], s.k.row(e.k)[r]}) {
      const long double x = oracle_sigmoid(y);
      pen += x * x;
    }
  }
  return 0.5L * err * err + 0.5L * lambda * pen;
}

// Central difference of the objective in one parameter, step 1e-6.
double finite_difference(FactorState s, const Entry& e, double lambda, int mode, std::size_t r) {
  FactorTable& t = mode == 0 ? s.i : mode == 1 ? s.j : s.k;
  const Index row = mode == 0 ? e.i : mode == 1 ? e.j : e.k;
  const double saved = t.row(row)[r];
  const double h = 1e-6;
  t.row(row)[r] = saved + h;
  const long double up = oracle_objective(s, e, lambda);
  t.row(row)[r] = saved - h;
  const long double down = oracle_objective(s, e, lambda);
  const long double step = static_cast<long double>(saved + h) - static_cast<long double>(saved - h);
  return static_cast<double>((up - down) / step);
}

}  // namespace

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::abs(sigmoid(50.0) - 1.0) <= 1e-15);
  CHECK(std::abs(sigmoid(-3.0) - (1.0 - sigmoid(3.0))) <= 1e-15);
  CHECK(sigmoid(-700.0) > 0.0);
  double prev = 0.0;
  for (double a = -30; a <= 30; a += 0.125) {
    const double s = sigmoid(a);
    CHECK(s >= prev);
    CHECK(s > 0.0);
    prev = s;
  }
}

TEST_CASE("sigmoid derivative") {
  CHECK(sigmoid_derivative(0.0) == 0.25);
  for (double a : {0.1, 0.7, 2.5, 9.0}) CHECK(sigmoid_derivative(a) == sigmoid_derivative(-a));
  const double h = 1e-5;
  const double fd = (sigmoid(1.3 + h) - sigmoid(1.3 - h)) / (2 * h);
  CHECK(std::abs(sigmoid_derivative(1.3) - fd) <= 1e-8);
  for (double a = -10; a <= 10; a += 0.5) {
    CHECK(sigmoid_derivative(a) > 0.0);
    CHECK(sigmoid_derivative(a) <= 0.25);
  }
}

TEST_CASE("predict") {
  CHECK(predict(zeros(2), 0, 1, 1) == 0.25);
  CHECK(predict(zeros(1), 1, 0, 1) == 0.125);
  CHECK_THROWS_AS(predict(zeros(1), 2, 0, 0), BoundsError);

  Rng rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto s = random_state(rng, {3, 4, 5}, 4, 3.0);
    const Entry e{static_cast<Index>(rng.below(3)), static_cast<Index>(rng.below(4)),
                  static_cast<Index>(rng.below(5)), 0.0};
    CHECK(std::abs(predict(s, e.i, e.j, e.k) - static_cast<double>(oracle_prediction(s, e))) <= 1e-12);
  }
}

TEST_CASE("predict is bounded and symmetric in the i/j roles") {
  Rng rng(8);
  for (int n = 0; n < 200; ++n) {
    const std::size_t rank = 1 + rng.below(6);
    auto s = random_state(rng, {3, 3, 2}, rank, 6.0);
    const double p = predict(s, 1, 2, 0);
    CHECK(p > 0.0);
    CHECK(p < static_cast<double>(rank));

    FactorState swapped = s;
    std::swap(swapped.i, swapped.j);
    CHECK(predict(swapped, 2, 1, 0) == p);
  }
}

TEST_CASE("derived factors are strictly inside (0, 1) for any reachable parameter") {
  Rng rng(13);
  for (int n = 0; n < 100; ++n) {
    const auto s = random_state(rng, {4, 4, 4}, 3, 30.0);
    for (const FactorTable* t : {&s.i, &s.j, &s.k}) {
      for (double y : t->values()) {
        const double x = sigmoid(y);
        CHECK(x > 0.0);
        CHECK(x < 1.0);
      }
    }
  }
}

TEST_CASE("residual") {
  CHECK(residual(zeros(1), {0, 0, 0, 1.0}) == 0.875);
  CHECK(residual(zeros(2), {0, 0, 0, 0.0}) == -0.25);
  Rng rng(2);
  const auto s = random_state(rng, {2, 2, 2}, 3, 1.0);
  CHECK(residual(s, {1, 0, 1, predict(s, 1, 0, 1)}) == 0.0);
}

TEST_CASE("loss") {
  const auto s = zeros(1);
  const auto empty = loss(s, {}, 0.3);
  CHECK(empty.data_term == 0.0);
  CHECK(empty.reg_term == 0.0);
  CHECK(empty.total == 0.0);

  const Entry one[] = {{0, 0, 0, 1.0}};
  const auto plain = loss(s, one, 0.0);
  CHECK(plain.data_term == 0.3828125);
  CHECK(plain.reg_term == 0.0);

  const auto reg = loss(s, one, 1.0);
  CHECK(reg.reg_term == 0.375);
  CHECK(reg.total == reg.data_term + reg.reg_term);

  CHECK_THROWS_AS(loss(s, one, -1.0), ConfigError);
}

TEST_CASE("loss regularizer is counted once per observed entry") {
  Rng rng(21);
  const auto s = random_state(rng, {2, 2, 2}, 2, 1.0);
  const Entry e{0, 1, 1, 0.4};
  const Entry twice[] = {e, {0, 1, 0, 0.2}};
  const Entry single[] = {e};
  const Entry other[] = {twice[1]};
  const double lambda = 0.7;
  const auto both = loss(s, twice, lambda);
  CHECK(both.reg_term == doctest::Approx(loss(s, single, lambda).reg_term + loss(s, other, lambda).reg_term));
  CHECK(both.total >= 0.0);
  CHECK(both.total == doctest::Approx(both.data_term + both.reg_term).epsilon(1e-12));
}

TEST_CASE("point gradient worked example") {
  const auto s = zeros(1);
  const Entry e{0, 0, 0, 1.0};
  const auto g = point_gradient(s, e, 0.0);
  CHECK(g.y_i[0] == -0.0546875);
  CHECK(g.y_j[0] == -0.0546875);
  CHECK(g.y_k[0] == -0.0546875);
  for (int mode = 0; mode < 3; ++mode) CHECK(std::abs(finite_difference(s, e, 0.0, mode, 0) + 0.0546875) <= 1e-9);
}

TEST_CASE("point gradient is zero at an exact unregularized fit") {
  Rng rng(4);
  const auto s = random_state(rng, {2, 2, 2}, 3, 2.0);
  const auto g = point_gradient(s, {1, 1, 0, predict(s, 1, 1, 0)}, 0.0);
  for (const auto* v : {&g.y_i, &g.y_j, &g.y_k})
    for (double x : *v) CHECK(x == 0.0);
}

TEST_CASE("point gradient matches finite differences on random samples") {
  Rng rng(1234);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t rank = 1 + rng.below(6);
    const auto s = random_state(rng, {3, 3, 3}, rank, 2.5);
    const Entry e{static_cast<Index>(rng.below(3)), static_cast<Index>(rng.below(3)),
                  static_cast<Index>(rng.below(3)), rng.uniform()};
    const double lambda = n % 4 == 0 ? 0.0 : rng.uniform(0.0, 0.5);
    const auto g = point_gradient(s, e, lambda);
    const std::vector<double>* parts[3] = {&g.y_i, &g.y_j, &g.y_k};
    for (int mode = 0; mode < 3; ++mode) {
      for (std::size_t r = 0; r < rank; ++r) {
        const double analytic = (*parts[mode])[r];
        const double numeric = finite_difference(s, e, lambda, mode, r);
        const double diff = std::abs(analytic - numeric);
        const double mag = std::max(std::abs(analytic), std::abs(numeric));
        if (mag < 1e-9) {
          CHECK(diff <= 1e-9);
        } else {
          worst = std::max(worst, diff / mag);
        }
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("raw-y regularization differs from the exact gradient only through lambda") {
  Rng rng(3);
  const auto s = random_state(rng, {2, 2, 2}, 2, 1.0);
  const Entry e{0, 1, 0, 0.3};
  const auto exact0 = point_gradient(s, e, 0.0, RegMode::Exact);
  const auto raw0 = point_gradient(s, e, 0.0, RegMode::RawY);
  CHECK(exact0.y_i == raw0.y_i);
  const auto exact = point_gradient(s, e, 0.5, RegMode::Exact);
  const auto raw = point_gradient(s, e, 0.5, RegMode::RawY);
  const double y = s.i.row(0)[0];
  CHECK(raw.y_i[0] - exact.y_i[0] == doctest::Approx(sigmoid_derivative(y) * 0.5 * (y - sigmoid(y))));
  CHECK(parse_reg_mode("raw-y") == RegMode::RawY);
  CHECK_THROWS_AS(parse_reg_mode("nope"), ConfigError);
}

TEST_CASE("model file round trip preserves predictions bit for bit") {
  Rng rng(77);
  const auto s = random_state(rng, {5, 4, 3}, 3, 4.0);
  std::stringstream io;
  write_model(io, s, 987654321);
  CHECK(io.str().rfind("#factors\t5\t4\t3\t3\t987654321\n", 0) == 0);
  const auto back = read_model(io);
  CHECK(back.seed == 987654321);
  CHECK(back.state == s);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 4; ++j)
      for (Index k = 0; k < 3; ++k) CHECK(predict(back.state, i, j, k) == predict(s, i, j, k));
}

TEST_CASE("model parse errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_model(in);
  };
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("#factors\t1\t1\t1\t0\t1\n"), ParseError);
  CHECK_THROWS_AS(parse("#factors\t1\t1\t1\t1\t1\n0.5\n0.5\n"), ParseError);
  CHECK_THROWS_AS(parse("#factors\t1\t1\t1\t2\t1\n0.5\n0.5\t1\n0\t0\n"), ParseError);
  CHECK_NOTHROW(parse("#factors\t1\t1\t1\t1\t1\n0.5\n-0.25\n3\n"));
}
