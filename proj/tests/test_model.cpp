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

#include "relaysel/model.hpp"

#include <random>

using namespace relaysel;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd row(std::initializer_list<double> v) { return vec(v).transpose(); }

}  // namespace

TEST_CASE("rate_compound examples") {
  CHECK(rate_compound(0, 0) == doctest::Approx(0.0));
  CHECK(rate_compound(3, 0) == doctest::Approx(1.0));
  CHECK(rate_compound(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("rate_compound is concave and monotone") {
  std::mt19937_64 rng(7);
  std::exponential_distribution<double> e(0.1);
  for (int i = 0; i < 1000; ++i) {
    const double c = e(rng), x = e(rng), y = e(rng);
    CHECK(rate_compound(c, 0.5 * (x + y)) >= 0.5 * (rate_compound(c, x) + rate_compound(c, y)) - 1e-12);
    CHECK(rate_compound(c, x + y) >= rate_compound(c, x));
    CHECK(rate_compound(c + y, x) >= rate_compound(c, x));
  }
}

TEST_CASE("repetition rate examples") {
  const MatrixXd one = MatrixXd::Ones(1, 1);
  CHECK(rate_user_repetition(ChannelInstance(vec({3}), row({0})), one, 0) == doctest::Approx(1.0));
  CHECK(rate_user_repetition(ChannelInstance(vec({1}), row({2}), vec({1e12})), one, 0) == doctest::Approx(1.0));
  CHECK(rate_user_repetition(ChannelInstance(vec({1}), row({6}), vec({1})), one, 0) == doctest::Approx(0.5));
}

TEST_CASE("repetition cap uses the weakest serving relay") {
  const ChannelInstance inst(vec({0}), MatrixXd::Constant(2, 1, 10.0), vec({1, 3}));
  MatrixXd a(2, 1);
  a << 1, 1;
  CHECK(rate_user_repetition(inst, a, 0) == doctest::Approx(0.5));
  a << 0, 1;
  CHECK(rate_user_repetition(inst, a, 0) == doctest::Approx(1.0));
  // No serving relay: direct rate, uncapped.
  a << 0, 0;
  const ChannelInstance strong(vec({15}), MatrixXd::Constant(2, 1, 10.0), vec({1, 3}));
  CHECK(rate_user_repetition(strong, a, 0) == doctest::Approx(2.0));
}

TEST_CASE("independent rate examples") {
  const MatrixXd one = MatrixXd::Ones(1, 1);
  CHECK(rate_user_independent(ChannelInstance(vec({0}), row({0})), one, 0) == doctest::Approx(0.0));
  CHECK(rate_user_independent(ChannelInstance(vec({3}), row({3})), one, 0) == doctest::Approx(2.0));
  CHECK(rate_user_independent(ChannelInstance(vec({1}), row({0})), one, 0) == doctest::Approx(0.5));
}

TEST_CASE("assumption_holds examples") {
  CHECK(assumption_holds(ChannelInstance(vec({1}), row({2}), vec({10}))));
  CHECK_FALSE(assumption_holds(ChannelInstance(vec({1}), row({2}), vec({2}))));
  CHECK_FALSE(assumption_holds(ChannelInstance(vec({1}), row({2}), vec({3.0}))));
  CHECK_THROWS_AS(assumption_holds(ChannelInstance(vec({1}), row({2}))), MissingSourceRelayData);
}

TEST_CASE("rate report aggregates recompute from per-user rates") {
  const RateReport r = RateReport::from(vec({0.25, 1.5, 0.75}));
  CHECK(r.sum_rate == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r.min_rate == 0.25);
}

TEST_CASE("rates are monotone in allocation") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int t = 0; t < 200; ++t) {
    MatrixXd p(2, 3);
    VectorXd c(3);
    for (int k = 0; k < 3; ++k) {
      c(k) = e(rng);
      p(0, k) = e(rng);
      p(1, k) = e(rng);
    }
    const ChannelInstance inst(c, p);
    MatrixXd a(2, 3);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k) a(j, k) = u(rng) / 3.0;
    MatrixXd more = a;
    more(t % 2, t % 3) += 0.1;
    for (Codebook cb : {Codebook::repetition, Codebook::independent}) {
      const VectorXd r0 = evaluate_rates(inst, a, cb).per_user;
      const VectorXd r1 = evaluate_rates(inst, more, cb).per_user;
      CHECK((r1.array() >= r0.array() - 1e-15).all());
    }
  }
}

TEST_CASE("instance and allocation validation") {
  CHECK_THROWS_AS(ChannelInstance(vec({-1}), row({1})), InvalidInput);
  CHECK_THROWS_AS(ChannelInstance(vec({1, 2}), row({1})), InvalidInput);
  CHECK_THROWS_AS(ChannelInstance(vec({1}), row({std::nan("")})), InvalidInput);
  CHECK_THROWS_AS(ChannelInstance(vec({1}), row({1}), vec({1, 2})), InvalidInput);
  CHECK_THROWS_AS(PowerAllocation(row({0.7, 0.7})), InvalidInput);
  CHECK_THROWS_AS(PowerAllocation(row({0.2, 0.7}), true), InvalidInput);
  CHECK_NOTHROW(PowerAllocation(row({0.3, 0.7}), true));
  CHECK_THROWS_AS(Assignment({0, 2}, 2), InvalidInput);
  SolverOptions bad;
  bad.nonzero_eps = 1e-9;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("codebook names round-trip") {
  for (Codebook cb : {Codebook::repetition, Codebook::independent}) CHECK(parse_codebook(to_string(cb)) == cb);
  CHECK_THROWS_AS(parse_codebook("turbo"), InvalidInput);
}

TEST_CASE("assignment lists users per relay") {
  const Assignment a({1, 0, 1}, 3);
  CHECK(a.users_of(1) == std::vector<int>{0, 2});
  CHECK(a.users_of(2).empty());
}
