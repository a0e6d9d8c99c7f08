// Copyright 2026 The relaysel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include "oracles.hpp"
#include "relaysel/model.hpp"
#include "relaysel/waterfill.hpp"

#include <random>

using namespace relaysel;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("waterfill examples") {
  auto a = waterfill_relay(vec({1, 1}), vec({1, 1}), 1.0).alpha;
  CHECK(a(0) == doctest::Approx(0.5));
  CHECK(a(1) == doctest::Approx(0.5));

  a = waterfill_relay(vec({1, 4}), vec({1, 1}), 1.0).alpha;
  CHECK(a(0) == doctest::Approx(1.0));
  CHECK(a(1) == doctest::Approx(0.0));

  a = waterfill_relay(vec({1, 4}), vec({1, 1}), 1.0, vec({0, 0.5948})).alpha;
  CHECK(a(0) == doctest::Approx(0.4052));
  CHECK(a(1) == doctest::Approx(0.5948));
}

TEST_CASE("waterfill examples agree with the grid oracle") {
  const double best = oracle::grid_waterfill(vec({1, 4}), vec({1, 1}), 1.0, vec({0, 0}), 1e-4);
  CHECK(oracle::waterfill_objective(vec({1, 4}), vec({1, 1}), vec({1, 0})) >= best - 1e-12);
  const double floored = oracle::grid_waterfill(vec({1, 4}), vec({1, 1}), 1.0, vec({0, 0.5948}), 1e-4);
  CHECK(oracle::waterfill_objective(vec({1, 4}), vec({1, 1}), vec({0.4052, 0.5948})) >= floored - 1e-9);
}

TEST_CASE("infeasible floors") {
  CHECK_THROWS_AS(waterfill_relay(vec({1, 1}), vec({1, 1}), 1.0, vec({0.6, 0.6})), InfeasibleLowerBounds);
}

TEST_CASE("zero gains keep their floor and unused budget stays unused") {
  const auto r = waterfill_relay(vec({1, 1, 1}), vec({0, 2, 0}), 1.0, vec({0.1, 0, 0}));
  CHECK(r.alpha(0) == doctest::Approx(0.1));
  CHECK(r.alpha(1) == doctest::Approx(0.9));
  CHECK(r.alpha(2) == 0.0);
  const auto none = waterfill_relay(vec({1, 1}), vec({0, 0}), 1.0);
  CHECK(none.alpha.sum() == 0.0);
}

TEST_CASE("waterfill matches bisection and satisfies stationarity") {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int t = 0; t < 500; ++t) {
    const int K = 1 + t % 7;
    VectorXd b(K), p(K);
    for (int k = 0; k < K; ++k) {
      b(k) = 1.0 + 5.0 * e(rng);
      p(k) = 10.0 * e(rng);
    }
    const double budget = u(rng);
    const auto r = waterfill_relay(b, p, budget);
    const VectorXd ref = oracle::bisection_waterfill(b, p, budget);
    CHECK((r.alpha - ref).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(r.alpha.sum() == doctest::Approx(budget).epsilon(1e-12));
    CHECK(waterfill_kkt_residual(b, p, VectorXd::Zero(K), r.alpha, r.multiplier) < 1e-10);
  }
}

TEST_CASE("floored waterfill never loses to the floored grid") {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int t = 0; t < 100; ++t) {
    const int K = 2 + t % 2;
    VectorXd b(K), p(K), floors(K);
    for (int k = 0; k < K; ++k) {
      b(k) = 1.0 + e(rng);
      p(k) = 5.0 * e(rng);
      floors(k) = u(rng);
    }
    const auto r = waterfill_relay(b, p, 1.0, floors);
    CHECK((r.alpha.array() >= floors.array() - 1e-12).all());
    const double grid = oracle::grid_waterfill(b, p, 1.0, floors, 1e-3);
    CHECK(oracle::waterfill_objective(b, p, r.alpha) >= grid - 1e-9);
  }
}

TEST_CASE("single-relay max-min levels") {
  // Repetition: min(2a, 1 - a) peaks at a = 1/3.
  auto r = maxmin_relay_repetition(vec({0, 0}), vec({2, 1}));
  CHECK(r.alpha(0) == doctest::Approx(1.0 / 3.0));
  CHECK(r.alpha(1) == doctest::Approx(2.0 / 3.0));
  CHECK(r.level == doctest::Approx(2.0 / 3.0));

  // A strong direct link takes no power.
  r = maxmin_relay_repetition(vec({0, 10}), vec({1, 1}));
  CHECK(r.alpha(0) == doctest::Approx(1.0));
  CHECK(r.alpha(1) == doctest::Approx(0.0));

  std::mt19937_64 rng(9);
  std::exponential_distribution<double> e(1.0);
  for (int t = 0; t < 200; ++t) {
    const int K = 2 + t % 4;
    VectorXd c(K), p(K);
    for (int k = 0; k < K; ++k) {
      c(k) = e(rng);
      p(k) = 3.0 * e(rng);
    }
    // Independent codebooks: every powered user reaches the common level.
    const auto ind = maxmin_relay_independent(c, p);
    double lowest = 1e300;
    for (int k = 0; k < K; ++k) {
      const double rate = oracle::half_log2(1 + c(k)) + oracle::half_log2(1 + p(k) * ind.alpha(k));
      lowest = std::min(lowest, rate);
      if (ind.alpha(k) > 1e-12) CHECK(std::exp2(2 * rate) == doctest::Approx(ind.level).epsilon(1e-9));
    }
    CHECK(ind.alpha.sum() == doctest::Approx(1.0));
    // Grid oracle on the minimum rate for K = 2.
    if (K == 2) {
      double best = -1;
      for (int n = 0; n <= 10000; ++n) {
        const double a = n / 10000.0;
        best = std::max(best, std::min(oracle::half_log2(1 + c(0)) + oracle::half_log2(1 + p(0) * a),
                                       oracle::half_log2(1 + c(1)) + oracle::half_log2(1 + p(1) * (1 - a))));
      }
      CHECK(lowest >= best - 1e-12);
    }
  }
}
