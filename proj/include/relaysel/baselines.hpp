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

#include <Eigen/Dense>

#include <string>

namespace relaysel {

enum class DirectObjective { sum, equal_rate };

DirectObjective parse_direct_objective(const std::string& name);

/// Per-user power of single-slot direct transmission: water-filling on
/// sum_k log2(1 + q_k g_k) or the common-rate split q_k = (2^t - 1)/g_k.
/// With any g_k = 0 the equal-rate split leaves all power unused.
Eigen::VectorXd direct_power(const Eigen::VectorXd& gains, double total_power, DirectObjective objective);

/// Rates log2(1 + q_k g_k) with gains given as SNR per unit power.
RateReport siso_rates(const Eigen::VectorXd& gains, double total_power, DirectObjective objective);

/// Matched beamforming: antennas x K complex channels, effective gain
/// ||h_k||^2, then the single-antenna allocation.
RateReport miso_rates(const Eigen::MatrixXcd& channels, double total_power, DirectObjective objective);

/// Two-slot relay system: the rounded selection heuristic for the sum
/// objective, rounding plus per-relay refinement for max-min. Rates include
/// the source-relay cap.
RateReport relay_system_rates(const ChannelInstance& inst, ObjectiveKind objective,
                              const SolverOptions& options = {});

}  // namespace relaysel
