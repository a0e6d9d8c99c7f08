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

#include "relaysel/baselines.hpp"

#include "relaysel/waterfill.hpp"

#include <cmath>

namespace relaysel {

DirectObjective parse_direct_objective(const std::string& name) {
  if (name == "sum") return DirectObjective::sum;
  if (name == "equal_rate") return DirectObjective::equal_rate;
  throw InvalidInput("unknown direct objective '" + name + "'");
}

Eigen::VectorXd direct_power(const Eigen::VectorXd& gains, double total_power, DirectObjective objective) {
  if (!(total_power > 0.0)) throw InvalidInput("total power must be positive");
  if ((gains.array() < 0.0).any() || !gains.allFinite()) throw InvalidInput("gains must be finite and non-negative");
  const auto K = gains.size();
  if (objective == DirectObjective::sum)
    return waterfill_relay(Eigen::VectorXd::Ones(K), gains, total_power).alpha;
  if ((gains.array() <= 0.0).any() || K == 0) return Eigen::VectorXd::Zero(K);
  // sum_k (2^t - 1)/g_k = P has the closed form 2^t - 1 = P / sum_k 1/g_k.
  const double snr = total_power / gains.cwiseInverse().sum();
  return (snr * gains.cwiseInverse().array()).matrix();
}

RateReport siso_rates(const Eigen::VectorXd& gains, double total_power, DirectObjective objective) {
  const Eigen::VectorXd q = direct_power(gains, total_power, objective);
  Eigen::VectorXd r(gains.size());
  for (Eigen::Index k = 0; k < gains.size(); ++k) r(k) = std::log2(1.0 + q(k) * gains(k));
  if (objective == DirectObjective::equal_rate && r.size() > 0) {
    // Every user gets the same rate; report the closed form to avoid
    // last-bit differences between users.
    const double common = (gains.array() > 0.0).all() ? std::log2(1.0 + total_power / gains.cwiseInverse().sum()) : 0.0;
    r.setConstant(common);
  }
  return RateReport::from(std::move(r));
}

RateReport miso_rates(const Eigen::MatrixXcd& channels, double total_power, DirectObjective objective) {
  const Eigen::VectorXd gains = channels.cwiseAbs2().colwise().sum().transpose();
  return siso_rates(gains, total_power, objective);
}

RateReport relay_system_rates(const ChannelInstance& inst, ObjectiveKind objective, const SolverOptions& options) {
  if (objective == ObjectiveKind::sum_min) throw InvalidInput("relay system baseline supports sum and max_min");
  const Objective obj = objective == ObjectiveKind::sum ? Objective::sum() : Objective::max_min();
  const BoundPair bp = bound_pair(inst, obj, options);
  return evaluate_rates(inst, bp.selection.alpha.alpha(), Codebook::repetition);
}

}  // namespace relaysel
