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

#include "relaysel/waterfill.hpp"

#include "relaysel/model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace relaysel {

WaterfillResult waterfill_relay(const Eigen::Ref<const Eigen::VectorXd>& base,
                                const Eigen::Ref<const Eigen::VectorXd>& gains, double budget,
                                const Eigen::Ref<const Eigen::VectorXd>& floors) {
  const Eigen::Index K = base.size();
  if (gains.size() != K || floors.size() != K) throw InvalidInput("waterfill: size mismatch");
  if (!(budget > 0.0)) throw InvalidInput("waterfill: budget must be positive");
  if ((floors.array() < 0.0).any()) throw InvalidInput("waterfill: negative floor");

  const double floor_total = floors.sum();
  const double slack = 1e-9 * std::max(1.0, budget);
  if (floor_total > budget + slack)
    throw InfeasibleLowerBounds("floors sum to " + std::to_string(floor_total) +
                                " which exceeds the budget " + std::to_string(budget));

  WaterfillResult out;
  out.alpha = floors;

  // Breakpoints t_k = floor_k + b_k/p_k for users that can take power.
  std::vector<std::pair<double, Eigen::Index>> breaks;
  breaks.reserve(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k)
    if (gains(k) > 0.0) breaks.emplace_back(floors(k) + base(k) / gains(k), k);
  if (breaks.empty()) {
    out.level = std::numeric_limits<double>::infinity();
    out.multiplier = 0.0;
    return out;
  }
  std::sort(breaks.begin(), breaks.end());

  const double free_budget = std::max(0.0, budget - floor_total);
  double prefix = 0.0;
  double level = breaks.front().first;
  std::size_t active = 0;
  for (std::size_t m = 0; m < breaks.size(); ++m) {
    prefix += breaks[m].first;
    const double candidate = (free_budget + prefix) / static_cast<double>(m + 1);
    const bool last = m + 1 == breaks.size();
    if (last || candidate <= breaks[m + 1].first) {
      level = candidate;
      active = m + 1;
      break;
    }
  }
  for (std::size_t m = 0; m < active; ++m) {
    const Eigen::Index k = breaks[m].second;
    out.alpha(k) = std::max(floors(k), level - base(k) / gains(k));
  }
  out.level = level;
  out.multiplier = 1.0 / level;
  return out;
}

double waterfill_kkt_residual(const Eigen::Ref<const Eigen::VectorXd>& base,
                              const Eigen::Ref<const Eigen::VectorXd>& gains,
                              const Eigen::Ref<const Eigen::VectorXd>& floors,
                              const Eigen::Ref<const Eigen::VectorXd>& alpha, double multiplier) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < base.size(); ++k) {
    if (gains(k) <= 0.0) continue;
    const double marginal = gains(k) / (base(k) + gains(k) * alpha(k));
    // Strictly above the floor the marginal equals the multiplier; at the floor it may not exceed it.
    if (alpha(k) > floors(k) * (1.0 + 1e-12))
      worst = std::max(worst, std::abs(marginal - multiplier));
    else
      worst = std::max(worst, marginal - multiplier);
  }
  return worst;
}

namespace {

// Solves sum_k max(0, A_k v - B_k) = budget for v over entries with A_k > 0.
MaxMinRelayResult solve_level(const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                              const std::vector<int>& users, double budget, int size) {
  MaxMinRelayResult out;
  out.alpha = Eigen::VectorXd::Zero(size);
  if (users.empty()) {
    out.level = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<int> order = users;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return B(a) / A(a) < B(b) / A(b); });
  double sum_a = 0.0;
  double sum_b = 0.0;
  double v = 0.0;
  for (std::size_t m = 0; m < order.size(); ++m) {
    sum_a += A(order[m]);
    sum_b += B(order[m]);
    v = (budget + sum_b) / sum_a;
    if (m + 1 == order.size() || v <= B(order[m + 1]) / A(order[m + 1])) break;
  }
  out.level = v;
  for (int k : users) out.alpha(k) = std::max(0.0, A(k) * v - B(k));
  return out;
}

}  // namespace

MaxMinRelayResult maxmin_relay_repetition(const Eigen::Ref<const Eigen::VectorXd>& direct,
                                          const Eigen::Ref<const Eigen::VectorXd>& gains,
                                          double budget) {
  const auto n = direct.size();
  Eigen::VectorXd A = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  std::vector<int> users;
  for (Eigen::Index k = 0; k < n; ++k)
    if (gains(k) > 0.0) {
      A(k) = 1.0 / gains(k);
      B(k) = direct(k) / gains(k);
      users.push_back(static_cast<int>(k));
    }
  return solve_level(A, B, users, budget, static_cast<int>(n));
}

MaxMinRelayResult maxmin_relay_independent(const Eigen::Ref<const Eigen::VectorXd>& direct,
                                           const Eigen::Ref<const Eigen::VectorXd>& gains,
                                           double budget) {
  // With v = 2^(2 rate): alpha_k = max(0, v/(1+c_k) - 1)/p_k.
  const auto n = direct.size();
  Eigen::VectorXd A = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  std::vector<int> users;
  for (Eigen::Index k = 0; k < n; ++k)
    if (gains(k) > 0.0) {
      A(k) = 1.0 / ((1.0 + direct(k)) * gains(k));
      B(k) = 1.0 / gains(k);
      users.push_back(static_cast<int>(k));
    }
  return solve_level(A, B, users, budget, static_cast<int>(n));
}

}  // namespace relaysel
