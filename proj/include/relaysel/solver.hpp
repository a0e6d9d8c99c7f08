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
#include "relaysel/relaxed.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace relaysel {

/// Guaranteed per-user rates R_k in bits/s/Hz.
struct MinRateTargets {
  Eigen::VectorXd r;
};

/// Solution of a relaxed (multi-relay) program: the upper bound.
struct RelaxedSolution {
  PowerAllocation alpha;
  RateReport rates;         // without the source-relay cap
  double objective = 0.0;   // sum rate, or minimum rate for max-min
  double kkt_residual = 0.0;
  bool certified = false;   // kkt_residual <= tol at return
  std::vector<int> multi_relay_users;
  Duals duals;
  int iterations = 0;
};

RelaxedSolution solve_sum_rate(const ChannelInstance& inst, const SolverOptions& options = {},
                               Codebook codebook = Codebook::repetition);

/// Throws Infeasible if no allocation meets every target.
RelaxedSolution solve_sum_rate_min(const ChannelInstance& inst, const MinRateTargets& targets,
                                   const SolverOptions& options = {},
                                   Codebook codebook = Codebook::repetition);

RelaxedSolution solve_max_min(const ChannelInstance& inst, const SolverOptions& options = {},
                              Codebook codebook = Codebook::repetition);

/// KKT violation of a sum-rate (optionally rate-floored) relaxed program.
double kkt_residual(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, const Duals& duals,
                    const std::optional<MinRateTargets>& targets = std::nullopt,
                    Codebook codebook = Codebook::repetition);

/// Users with at least two entries above `eps`.
std::vector<int> multi_relay_users(const Eigen::MatrixXd& alpha, double eps);

}  // namespace relaysel
