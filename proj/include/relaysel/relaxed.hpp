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

#include <Eigen/Dense>

#include <optional>

namespace relaysel {

/// Common form of the relaxed sum-rate programs:
///
///   maximize  sum_k [ constant_k + (1/2) log2(offset_k + s_k) ]
///   s.t.      s_k = sum_j p_jk alpha_jk,  sum_k alpha_jk <= 1,  alpha >= 0,
///             s_k >= floor_k  for users with floor_k > 0.
///
/// Repetition coding uses offset_k = 1 + c_k; independent codebooks use
/// offset_k = 1 with the direct-link term moved into constant_k.
struct RelaxedProblem {
  Eigen::MatrixXd gains;
  Eigen::VectorXd offset;
  Eigen::VectorXd constant;
  Eigen::VectorXd floor;  // SNR floors; <= 0 means unconstrained

  static RelaxedProblem make(const ChannelInstance& inst, Codebook codebook);
  static RelaxedProblem make(const ChannelInstance& inst, Codebook codebook,
                             const Eigen::VectorXd& target_rates);

  int relays() const { return static_cast<int>(gains.rows()); }
  int users() const { return static_cast<int>(gains.cols()); }
  bool has_floors() const { return (floor.array() > 0.0).any(); }

  Eigen::VectorXd snr(const Eigen::MatrixXd& alpha) const;
  Eigen::VectorXd user_rates(const Eigen::MatrixXd& alpha) const;
  double objective(const Eigen::MatrixXd& alpha) const { return user_rates(alpha).sum(); }
};

/// Budget multipliers nu_j and per-user rate-floor multipliers gamma_k.
struct Duals {
  Eigen::VectorXd nu;
  Eigen::VectorXd gamma;
};

/// Largest absolute violation of the KKT system of a RelaxedProblem:
/// stationarity (1+gamma_k) dR_k/dalpha_jk + lambda_jk = nu_j with
/// lambda_jk = max(0, nu_j - (1+gamma_k) dR_k/dalpha_jk), complementary
/// slackness lambda*alpha, nu_j (1 - sum_k alpha_jk) and gamma_k (R_k - target),
/// plus primal and dual feasibility.
double kkt_residual(const RelaxedProblem& problem, const Eigen::MatrixXd& alpha, const Duals& duals);

/// Budget multipliers that make stationarity hold with zero dual violation:
/// nu_j = max_k (1+gamma_k) dR_k/dalpha_jk.
Eigen::VectorXd implied_budget_duals(const RelaxedProblem& problem, const Eigen::MatrixXd& alpha,
                                     const Eigen::VectorXd& gamma);

struct Certificate {
  Eigen::MatrixXd alpha;
  Duals duals;
  double residual = 0.0;
  int rounds = 0;
};

/// Exact KKT point from an approximate one.
///
/// On a fixed support (which relays serve which user, which floors bind) the
/// KKT system is linear in the water levels 1/nu_j and in the entries of
/// users served by several relays. The support is read off `start`, the
/// system solved, and the support corrected one violation at a time until
/// every sign condition holds. Returns nullopt if no certificate is found
/// within `max_rounds` corrections.
std::optional<Certificate> polish_kkt(const RelaxedProblem& problem, const Eigen::MatrixXd& start,
                                      int max_rounds);

struct BarrierOptions {
  double gap = 1e-11;       // stop when (#constraints)/t falls below this
  double growth = 20.0;     // barrier parameter multiplier per outer step
  int max_newton = 2'000;   // over all outer steps
};

struct BarrierResult {
  Eigen::MatrixXd alpha;
  Duals duals;
  int newton_steps = 0;
  bool converged = false;
};

/// Log-barrier interior-point method for a RelaxedProblem, started from a
/// strictly feasible `start` (positive entries, row sums below one, floors
/// strictly exceeded). Dense Newton steps on all J*K entries.
BarrierResult solve_barrier(const RelaxedProblem& problem, const Eigen::MatrixXd& start,
                            const BarrierOptions& options = {});

}  // namespace relaysel
