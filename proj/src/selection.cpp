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

#include "relaysel/selection.hpp"

#include "relaysel/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace relaysel {

double Objective::value(const RateReport& rates) const {
  return kind == ObjectiveKind::max_min ? rates.min_rate : rates.sum_rate;
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::sum: return "sum";
    case ObjectiveKind::sum_min: return "sum_min";
    case ObjectiveKind::max_min: return "max_min";
  }
  return "sum";
}

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "sum") return ObjectiveKind::sum;
  if (name == "sum_min") return ObjectiveKind::sum_min;
  if (name == "max_min") return ObjectiveKind::max_min;
  throw InvalidInput("unknown objective '" + name + "' (expected sum, sum_min or max_min)");
}

namespace {

void check_targets(const Objective& objective) {
  if (objective.kind == ObjectiveKind::sum_min && !objective.targets)
    throw InvalidInput("sum_min objective needs rate targets");
}

}  // namespace

RelaxedSolution solve_relaxed(const ChannelInstance& inst, const Objective& objective,
                              const SolverOptions& options, Codebook codebook) {
  check_targets(objective);
  switch (objective.kind) {
    case ObjectiveKind::sum: return solve_sum_rate(inst, options, codebook);
    case ObjectiveKind::sum_min: return solve_sum_rate_min(inst, *objective.targets, options, codebook);
    case ObjectiveKind::max_min: return solve_max_min(inst, options, codebook);
  }
  return solve_sum_rate(inst, options, codebook);
}

Selection round_to_selection(const ChannelInstance& inst, const RelaxedSolution& relaxed,
                             const SolverOptions& options) {
  options.validate();
  const int J = inst.num_relays();
  const int K = inst.num_users();
  const Eigen::MatrixXd& alpha = relaxed.alpha.alpha();
  const Eigen::MatrixXd& p = inst.relay();
  std::vector<int> relay_of(static_cast<std::size_t>(K), 0);
  Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(J, K);
  for (int k = 0; k < K; ++k) {
    int best = 0;
    double best_snr = alpha(0, k) * p(0, k);
    for (int j = 1; j < J; ++j)
      if (alpha(j, k) * p(j, k) > best_snr) {
        best = j;
        best_snr = alpha(j, k) * p(j, k);
      }
    if (!(best_snr > 0.0)) {
      best = 0;
      for (int j = 1; j < J; ++j)
        if (p(j, k) > p(best, k)) best = j;
    }
    relay_of[static_cast<std::size_t>(k)] = best;
    kept(best, k) = alpha(best, k);
  }
  return {Assignment(std::move(relay_of), J), PowerAllocation(std::move(kept))};
}

Eigen::MatrixXd per_relay_allocation(const ChannelInstance& inst, const Assignment& assignment,
                                     const Objective& objective, Codebook codebook) {
  check_targets(objective);
  const int J = inst.num_relays();
  const int K = inst.num_users();
  if (assignment.num_users() != K || assignment.num_relays() != J)
    throw InvalidInput("assignment does not match the instance");
  const Eigen::VectorXd& c = inst.direct();
  const Eigen::MatrixXd& p = inst.relay();
  const bool repetition = codebook == Codebook::repetition;

  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(J, K);
  for (int j = 0; j < J; ++j) {
    const std::vector<int> users = assignment.users_of(j);
    if (users.empty()) continue;
    const auto n = static_cast<Eigen::Index>(users.size());
    Eigen::VectorXd cu(n), pu(n), base(n), floors = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = users[static_cast<std::size_t>(i)];
      cu(i) = c(k);
      pu(i) = p(j, k);
      base(i) = repetition ? 1.0 + c(k) : 1.0;
    }
    Eigen::VectorXd a;
    if (objective.kind == ObjectiveKind::max_min) {
      a = repetition ? maxmin_relay_repetition(cu, pu).alpha : maxmin_relay_independent(cu, pu).alpha;
    } else {
      if (objective.kind == ObjectiveKind::sum_min) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const int k = users[static_cast<std::size_t>(i)];
          const double r = objective.targets->r(k);
          const double need = repetition ? std::exp2(2.0 * r) - 1.0 - c(k)
                                         : std::exp2(2.0 * r) / (1.0 + c(k)) - 1.0;
          if (need <= 0.0) continue;
          if (!(pu(i) > 0.0))
            throw Infeasible("user " + std::to_string(k + 1) + " cannot reach its target through relay " +
                             std::to_string(j + 1));
          floors(i) = need / pu(i);
        }
      }
      try {
        a = waterfill_relay(base, pu, 1.0, floors).alpha;
      } catch (const InfeasibleLowerBounds&) {
        throw Infeasible("relay " + std::to_string(j + 1) + " cannot meet the targets of its users");
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) alpha(j, users[static_cast<std::size_t>(i)]) = a(i);
  }
  return alpha;
}

Refined refine_selection(const ChannelInstance& inst, const Assignment& assignment,
                         const Objective& objective, const SolverOptions& options, Codebook codebook) {
  options.validate();
  Eigen::MatrixXd alpha = per_relay_allocation(inst, assignment, objective, codebook);
  RateReport rates = evaluate_uncapped_rates(inst, alpha, codebook);
  return {PowerAllocation(std::move(alpha)), std::move(rates)};
}

bool refines_by_default(ObjectiveKind kind) { return kind != ObjectiveKind::sum; }

BoundPair bound_pair(const ChannelInstance& inst, const Objective& objective,
                     const SolverOptions& options, Codebook codebook, std::optional<bool> refine) {
  BoundPair out;
  out.relaxed = solve_relaxed(inst, objective, options, codebook);
  out.upper = out.relaxed.objective;
  out.selection = round_to_selection(inst, out.relaxed, options);
  if (refine.value_or(refines_by_default(objective.kind))) {
    Refined r = refine_selection(inst, out.selection.assignment, objective, options, codebook);
    out.selection.alpha = std::move(r.alpha);
    out.rates = std::move(r.rates);
  } else {
    out.rates = evaluate_uncapped_rates(inst, out.selection.alpha.alpha(), codebook);
  }
  out.lower = objective.value(out.rates);
  out.gap = (out.upper - out.lower) / std::max(out.upper, 1e-12);
  return out;
}

}  // namespace relaysel
