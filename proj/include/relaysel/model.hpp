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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaysel {

// Derivative scale of (1/2) log2(x): d/dx = kRateScale / x.
inline const double kRateScale = 1.0 / (2.0 * std::log(2.0));

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class MissingSourceRelayData : public Error {
public:
  MissingSourceRelayData() : Error("instance has no source-relay SNRs") {}
};

class InfeasibleLowerBounds : public Error {
public:
  using Error::Error;
};

class Infeasible : public Error {
public:
  using Error::Error;
};

class TooLarge : public Error {
public:
  using Error::Error;
};

enum class Codebook { repetition, independent };

/// Linear-scale SNRs of one downlink snapshot.
///
/// `direct(k)` is the BS-to-user SNR, `relay(j, k)` the full-power SNR from
/// relay j to user k and `source_relay(j)` (optional) the BS-to-relay SNR.
class ChannelInstance {
public:
  ChannelInstance(Eigen::VectorXd direct, Eigen::MatrixXd relay,
                  std::optional<Eigen::VectorXd> source_relay = std::nullopt);

  int num_relays() const { return static_cast<int>(relay_.rows()); }
  int num_users() const { return static_cast<int>(relay_.cols()); }

  const Eigen::VectorXd& direct() const { return direct_; }
  const Eigen::MatrixXd& relay() const { return relay_; }
  const std::optional<Eigen::VectorXd>& source_relay() const { return source_relay_; }
  bool has_source_relay() const { return source_relay_.has_value(); }

  /// Same channel with users reordered: user k of the result is user perm[k].
  ChannelInstance permuted_users(const std::vector<int>& perm) const;

private:
  Eigen::VectorXd direct_;
  Eigen::MatrixXd relay_;
  std::optional<Eigen::VectorXd> source_relay_;
};

/// J x K matrix of relay power fractions.
class PowerAllocation {
public:
  static constexpr double kTol = 1e-9;

  PowerAllocation() = default;
  explicit PowerAllocation(Eigen::MatrixXd alpha, bool budget_tight = false);

  static PowerAllocation zeros(int relays, int users) {
    return PowerAllocation(Eigen::MatrixXd::Zero(relays, users));
  }

  const Eigen::MatrixXd& alpha() const { return alpha_; }
  double operator()(int j, int k) const { return alpha_(j, k); }
  int num_relays() const { return static_cast<int>(alpha_.rows()); }
  int num_users() const { return static_cast<int>(alpha_.cols()); }
  bool budget_tight() const { return budget_tight_; }

private:
  Eigen::MatrixXd alpha_;
  bool budget_tight_ = false;
};

/// Serving relay of every user (0-based relay indices).
class Assignment {
public:
  Assignment() = default;
  Assignment(std::vector<int> relay_of, int num_relays);

  int operator[](int k) const { return relay_of_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& relay_of() const { return relay_of_; }
  int num_users() const { return static_cast<int>(relay_of_.size()); }
  int num_relays() const { return num_relays_; }
  std::vector<int> users_of(int relay) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

private:
  std::vector<int> relay_of_;
  int num_relays_ = 0;
};

/// Per-user rates in bits/s/Hz with their sum and minimum.
struct RateReport {
  Eigen::VectorXd per_user;
  double sum_rate = 0.0;
  double min_rate = 0.0;

  static RateReport from(Eigen::VectorXd per_user);
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 10'000;
  double nonzero_eps = 1e-7;

  void validate() const;
};

// (1/2) log2(1 + direct + relay_terms).
inline double rate_compound(double direct, double relay_terms) {
  return 0.5 * std::log2(1.0 + direct + relay_terms);
}

/// Total relay SNR received by user k: sum_j p_jk alpha_jk.
double relay_snr(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k);

/// Repetition-coded rate of user k. With source-relay data present the
/// compound rate is capped by the weakest source-relay link among the relays
/// that spend power on k; users served by no relay are not capped.
double rate_user_repetition(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k);

/// Independent-codebook rate: (1/2)log2(1+c_k) + (1/2)log2(1 + relay SNR).
double rate_user_independent(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k);

RateReport evaluate_rates(const ChannelInstance& inst, const Eigen::MatrixXd& alpha,
                          Codebook codebook = Codebook::repetition);

/// Rates with the source-relay cap ignored (the relaxed problems' objective).
RateReport evaluate_uncapped_rates(const ChannelInstance& inst, const Eigen::MatrixXd& alpha,
                                   Codebook codebook = Codebook::repetition);

/// True iff every source-relay link out-rates every compound link at full
/// relay power: sr_j > c_k + p_jk for all j, k.
bool assumption_holds(const ChannelInstance& inst);

std::string to_string(Codebook codebook);
Codebook parse_codebook(const std::string& name);

}  // namespace relaysel
