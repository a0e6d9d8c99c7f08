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

#pragma once

#include "relaysel/selection.hpp"

#include <cstdint>

namespace relaysel {

struct OracleResult {
  Assignment assignment;
  PowerAllocation alpha;
  RateReport rates;  // without the source-relay cap
  double value = 0.0;
  std::int64_t evaluated = 0;
};

/// Best selection over all J^K assignments with optimal per-relay power.
/// Counts in mixed radix with the last user as the fastest digit and keeps
/// the first strictly better assignment, so ties resolve to the
/// lexicographically smallest assignment. Throws TooLarge if J^K > limit and
/// Infeasible if no assignment meets sum_min targets.
OracleResult exhaustive_optimum(const ChannelInstance& inst, const Objective& objective,
                                const SolverOptions& options = {},
                                Codebook codebook = Codebook::repetition,
                                std::int64_t limit = 1'000'000);

}  // namespace relaysel
