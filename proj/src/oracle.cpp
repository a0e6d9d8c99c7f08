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

#include "relaysel/oracle.hpp"

#include <string>
#include <vector>

namespace relaysel {

OracleResult exhaustive_optimum(const ChannelInstance& inst, const Objective& objective,
                                const SolverOptions& options, Codebook codebook, std::int64_t limit) {
  options.validate();
  const int J = inst.num_relays();
  const int K = inst.num_users();
  std::int64_t total = 1;
  for (int k = 0; k < K; ++k) {
    if (total > limit / J) throw TooLarge(std::to_string(J) + "^" + std::to_string(K) + " assignments exceed the limit of " + std::to_string(limit));
    total *= J;
  }
  if (total > limit) throw TooLarge("assignment count exceeds the limit");

  OracleResult best;
  bool found = false;
  std::vector<int> digits(static_cast<std::size_t>(K), 0);
  for (std::int64_t n = 0; n < total; ++n) {
    if (n > 0) {
      for (int k = K - 1; k >= 0; --k) {
        auto& d = digits[static_cast<std::size_t>(k)];
        if (++d < J) break;
        d = 0;
      }
    }
    Assignment assignment(digits, J);
    Eigen::MatrixXd alpha;
    try {
      alpha = per_relay_allocation(inst, assignment, objective, codebook);
    } catch (const Infeasible&) {
      continue;
    }
    RateReport rates = evaluate_uncapped_rates(inst, alpha, codebook);
    const double value = objective.value(rates);
    if (!found || value > best.value) {
      found = true;
      best.assignment = std::move(assignment);
      best.alpha = PowerAllocation(std::move(alpha));
      best.rates = std::move(rates);
      best.value = value;
    }
  }
  if (!found) throw Infeasible("no assignment meets the rate targets");
  best.evaluated = total;
  return best;
}

}  // namespace relaysel
