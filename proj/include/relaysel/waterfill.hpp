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

#include <Eigen/Dense>

namespace relaysel {

struct WaterfillResult {
  Eigen::VectorXd alpha;
  // Water level: every user above its floor sits at alpha_k = level - b_k/p_k.
  double level = 0.0;
  // Lagrange multiplier of the budget for sum_k log(b_k + p_k alpha_k).
  double multiplier = 0.0;
};

/// Single-relay power split maximizing sum_k log(b_k + p_k alpha_k) subject to
/// sum_k alpha_k = budget and alpha_k >= floor_k.
///
/// The level is found exactly by sorting the breakpoints floor_k + b_k/p_k.
/// Users with p_k = 0 stay at their floor; if every gain is zero the budget is
/// left unspent. Throws InfeasibleLowerBounds if the floors exceed the budget.
WaterfillResult waterfill_relay(const Eigen::Ref<const Eigen::VectorXd>& base,
                                const Eigen::Ref<const Eigen::VectorXd>& gains, double budget,
                                const Eigen::Ref<const Eigen::VectorXd>& floors);

inline WaterfillResult waterfill_relay(const Eigen::Ref<const Eigen::VectorXd>& base,
                                       const Eigen::Ref<const Eigen::VectorXd>& gains,
                                       double budget = 1.0) {
  return waterfill_relay(base, gains, budget, Eigen::VectorXd::Zero(base.size()));
}

/// Max of sum_k w_k log(b_k + p_k alpha_k) stationarity violation for a
/// single relay at the given multiplier (test and certification helper).
double waterfill_kkt_residual(const Eigen::Ref<const Eigen::VectorXd>& base,
                              const Eigen::Ref<const Eigen::VectorXd>& gains,
                              const Eigen::Ref<const Eigen::VectorXd>& floors,
                              const Eigen::Ref<const Eigen::VectorXd>& alpha, double multiplier);

struct MaxMinRelayResult {
  Eigen::VectorXd alpha;
  // Common value reached by every user that receives power: the compound SNR
  // c_k + p_k alpha_k (repetition) or 2^(2 rate) (independent codebooks).
  double level = 0.0;
};

/// Single-relay split maximizing min_k (c_k + p_k alpha_k) over the users
/// with p_k > 0, spending the whole budget. Closed form over the sorted
/// breakpoints c_k.
MaxMinRelayResult maxmin_relay_repetition(const Eigen::Ref<const Eigen::VectorXd>& direct,
                                          const Eigen::Ref<const Eigen::VectorXd>& gains,
                                          double budget = 1.0);

/// Same for independent codebooks, maximizing
/// min_k (1/2)log2(1+c_k) + (1/2)log2(1 + p_k alpha_k).
MaxMinRelayResult maxmin_relay_independent(const Eigen::Ref<const Eigen::VectorXd>& direct,
                                           const Eigen::Ref<const Eigen::VectorXd>& gains,
                                           double budget = 1.0);

}  // namespace relaysel
