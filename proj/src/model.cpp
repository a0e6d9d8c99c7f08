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

#include "relaysel/model.hpp"

#include <algorithm>
#include <limits>

namespace relaysel {

namespace {

bool all_finite_nonnegative(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return (m.array().isFinite() && (m.array() >= 0.0)).all();
}

}  // namespace

ChannelInstance::ChannelInstance(Eigen::VectorXd direct, Eigen::MatrixXd relay,
                                 std::optional<Eigen::VectorXd> source_relay)
    : direct_(std::move(direct)), relay_(std::move(relay)), source_relay_(std::move(source_relay)) {
  if (relay_.rows() < 1 || relay_.cols() < 1)
    throw InvalidInput("instance needs at least one relay and one user");
  if (direct_.size() != relay_.cols())
    throw InvalidInput("direct-link vector length " + std::to_string(direct_.size()) +
                       " does not match " + std::to_string(relay_.cols()) + " users");
  if (!all_finite_nonnegative(direct_) || !all_finite_nonnegative(relay_))
    throw InvalidInput("SNR entries must be finite and non-negative");
  if (source_relay_) {
    if (source_relay_->size() != relay_.rows())
      throw InvalidInput("source-relay vector length does not match relay count");
    if (!all_finite_nonnegative(*source_relay_))
      throw InvalidInput("source-relay SNR entries must be finite and non-negative");
  }
}

ChannelInstance ChannelInstance::permuted_users(const std::vector<int>& perm) const {
  const int K = num_users();
  if (static_cast<int>(perm.size()) != K) throw InvalidInput("permutation size mismatch");
  Eigen::VectorXd c(K);
  Eigen::MatrixXd p(num_relays(), K);
  for (int k = 0; k < K; ++k) {
    c(k) = direct_(perm[static_cast<std::size_t>(k)]);
    p.col(k) = relay_.col(perm[static_cast<std::size_t>(k)]);
  }
  return ChannelInstance(std::move(c), std::move(p), source_relay_);
}

PowerAllocation::PowerAllocation(Eigen::MatrixXd alpha, bool budget_tight)
    : alpha_(std::move(alpha)), budget_tight_(budget_tight) {
  if (!alpha_.array().isFinite().all() || (alpha_.array() < 0.0).any())
    throw InvalidInput("power fractions must be finite and non-negative");
  for (Eigen::Index j = 0; j < alpha_.rows(); ++j) {
    const double row = alpha_.row(j).sum();
    if (row > 1.0 + kTol)
      throw InvalidInput("relay " + std::to_string(j) + " exceeds its power budget");
    if (budget_tight_ && std::abs(row - 1.0) > kTol)
      throw InvalidInput("relay " + std::to_string(j) + " does not spend its full budget");
  }
}

Assignment::Assignment(std::vector<int> relay_of, int num_relays)
    : relay_of_(std::move(relay_of)), num_relays_(num_relays) {
  for (int r : relay_of_)
    if (r < 0 || r >= num_relays_) throw InvalidInput("relay index out of range");
}

std::vector<int> Assignment::users_of(int relay) const {
  std::vector<int> users;
  for (int k = 0; k < num_users(); ++k)
    if (relay_of_[static_cast<std::size_t>(k)] == relay) users.push_back(k);
  return users;
}

RateReport RateReport::from(Eigen::VectorXd per_user) {
  RateReport r;
  r.sum_rate = per_user.sum();
  r.min_rate = per_user.size() > 0 ? per_user.minCoeff() : 0.0;
  r.per_user = std::move(per_user);
  return r;
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be positive");
  if (!(nonzero_eps > tol)) throw InvalidInput("nonzero_eps must exceed tol");
}

double relay_snr(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k) {
  return inst.relay().col(k).dot(alpha.col(k));
}

double rate_user_repetition(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k) {
  double rate = rate_compound(inst.direct()(k), relay_snr(inst, alpha, k));
  if (inst.has_source_relay()) {
    const auto& sr = *inst.source_relay();
    for (int j = 0; j < inst.num_relays(); ++j)
      if (alpha(j, k) > 0.0) rate = std::min(rate, 0.5 * std::log2(1.0 + sr(j)));
  }
  return rate;
}

double rate_user_independent(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, int k) {
  return 0.5 * std::log2(1.0 + inst.direct()(k)) + 0.5 * std::log2(1.0 + relay_snr(inst, alpha, k));
}

RateReport evaluate_rates(const ChannelInstance& inst, const Eigen::MatrixXd& alpha,
                          Codebook codebook) {
  Eigen::VectorXd r(inst.num_users());
  for (int k = 0; k < inst.num_users(); ++k)
    r(k) = codebook == Codebook::repetition ? rate_user_repetition(inst, alpha, k)
                                            : rate_user_independent(inst, alpha, k);
  return RateReport::from(std::move(r));
}

RateReport evaluate_uncapped_rates(const ChannelInstance& inst, const Eigen::MatrixXd& alpha,
                                   Codebook codebook) {
  Eigen::VectorXd r(inst.num_users());
  for (int k = 0; k < inst.num_users(); ++k)
    r(k) = codebook == Codebook::repetition
               ? rate_compound(inst.direct()(k), relay_snr(inst, alpha, k))
               : rate_user_independent(inst, alpha, k);
  return RateReport::from(std::move(r));
}

bool assumption_holds(const ChannelInstance& inst) {
  if (!inst.has_source_relay()) throw MissingSourceRelayData();
  const auto& sr = *inst.source_relay();
  for (int j = 0; j < inst.num_relays(); ++j)
    for (int k = 0; k < inst.num_users(); ++k)
      if (!(sr(j) > inst.direct()(k) + inst.relay()(j, k))) return false;
  return true;
}

std::string to_string(Codebook codebook) {
  return codebook == Codebook::repetition ? "repetition" : "independent";
}

Codebook parse_codebook(const std::string& name) {
  if (name == "repetition") return Codebook::repetition;
  if (name == "independent") return Codebook::independent;
  throw InvalidInput("unknown codebook '" + name + "'");
}

}  // namespace relaysel
