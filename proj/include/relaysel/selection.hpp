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

#include "relaysel/model.hpp"
#include "relaysel/solver.hpp"

#include <optional>
#include <string>

namespace relaysel {

enum class ObjectiveKind { sum, sum_min, max_min };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::sum;
  std::optional<MinRateTargets> targets;  // sum_min only

  static Objective sum() { return {}; }
  static Objective max_min() { return {ObjectiveKind::max_min, std::nullopt}; }
  static Objective sum_min(MinRateTargets targets) { return {ObjectiveKind::sum_min, std::move(targets)}; }

  /// Sum rate for the sum objectives, minimum rate for max-min.
  double value(const RateReport& rates) const;
};

std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& name);

/// Relaxed program matching the objective.
RelaxedSolution solve_relaxed(const ChannelInstance& inst, const Objective& objective,
                              const SolverOptions& options = {},
                              Codebook codebook = Codebook::repetition);

struct Selection {
  Assignment assignment;
  PowerAllocation alpha;
};

/// Assigns every user to the relay delivering it the most relay SNR
/// (lowest index on ties) and keeps only that entry. Users the relaxed
/// solution gives no relay power go to their strongest relay with zero power.
Selection round_to_selection(const ChannelInstance& inst, const RelaxedSolution& relaxed,
                             const SolverOptions& options = {});

struct Refined {
  PowerAllocation alpha;
  RateReport rates;  // without the source-relay cap
};

/// Optimal power of every relay over its own users for the objective.
/// Throws Infeasible if some relay cannot meet the floors of its users.
Eigen::MatrixXd per_relay_allocation(const ChannelInstance& inst, const Assignment& assignment,
                                     const Objective& objective,
                                     Codebook codebook = Codebook::repetition);

Refined refine_selection(const ChannelInstance& inst, const Assignment& assignment,
                         const Objective& objective, const SolverOptions& options = {},
                         Codebook codebook = Codebook::repetition);

/// Refinement is on by default for sum_min and max_min and off for sum.
bool refines_by_default(ObjectiveKind kind);

struct BoundPair {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  RelaxedSolution relaxed;
  Selection selection;  // power after refinement when refinement ran
  RateReport rates;     // of the selection, without the source-relay cap
};

/// Relax, round, optionally refine and report both bounds with the relative
/// gap (upper - lower) / max(upper, eps).
BoundPair bound_pair(const ChannelInstance& inst, const Objective& objective,
                     const SolverOptions& options = {}, Codebook codebook = Codebook::repetition,
                     std::optional<bool> refine = std::nullopt);

}  // namespace relaysel
