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

#include "relaysel/channel.hpp"
#include "relaysel/oracle.hpp"

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

}  // namespace

TEST_CASE("oracle examples") {
  MatrixXd p(2, 1);
  p << 3, 4;
  auto best = exhaustive_optimum(ChannelInstance(vec({0}), p), Objective::sum());
  CHECK(best.assignment[0] == 1);
  CHECK(best.value == doctest::Approx(0.5 * std::log2(5.0)));

  MatrixXd q(2, 2);
  q << 4, 1, 1, 4;
  best = exhaustive_optimum(ChannelInstance(vec({0, 0}), q), Objective::sum());
  CHECK(best.assignment.relay_of() == std::vector<int>{0, 1});
  CHECK(best.value == doctest::Approx(std::log2(5.0)));
  CHECK(best.evaluated == 4);

  MatrixXd one(1, 3);
  one << 1, 2, 3;
  const ChannelInstance single(vec({0, 1, 0}), one);
  CHECK(exhaustive_optimum(single, Objective::sum()).value ==
        doctest::Approx(solve_sum_rate(single).objective).epsilon(1e-12));
}

TEST_CASE("ties resolve to the lexicographically smallest assignment") {
  MatrixXd p = MatrixXd::Ones(2, 2);
  const auto best = exhaustive_optimum(ChannelInstance(vec({0, 0}), p), Objective::sum());
  CHECK(best.assignment.relay_of() == std::vector<int>{0, 1});
}

TEST_CASE("oracle limits and infeasibility") {
  Rng rng = make_rng(1, {9});
  const ChannelInstance big = draw_synthetic_rayleigh(4, 11, 10.0, rng);
  CHECK_THROWS_AS(exhaustive_optimum(big, Objective::sum()), TooLarge);
  CHECK_THROWS_AS(exhaustive_optimum(big, Objective::sum(), {}, Codebook::repetition, 100), TooLarge);

  MatrixXd p(2, 2);
  p << 3, 3, 3, 3;
  // Both users reach 0.9 only on separate relays; 1.5 each is out of reach.
  CHECK_NOTHROW(exhaustive_optimum(ChannelInstance(vec({0, 0}), p), Objective::sum_min({vec({0.9, 0.9})})));
  CHECK_THROWS_AS(exhaustive_optimum(ChannelInstance(vec({0, 0}), p), Objective::sum_min({vec({1.5, 1.5})})),
                  Infeasible);
}

TEST_CASE("oracle value is invariant under user permutation") {
  for (int t = 0; t < 20; ++t) {
    Rng rng = make_rng(2, {static_cast<std::uint64_t>(t)});
    const ChannelInstance inst = draw_synthetic_rayleigh(2, 5, 100.0, rng);
    const ChannelInstance permuted = inst.permuted_users({4, 2, 0, 3, 1});
    for (const Objective& obj : {Objective::sum(), Objective::max_min()})
      CHECK(exhaustive_optimum(inst, obj).value ==
            doctest::Approx(exhaustive_optimum(permuted, obj).value).epsilon(1e-12));
  }
}
