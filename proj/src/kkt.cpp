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

#include "relaysel/relaxed.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace relaysel {

namespace {

RelaxedProblem base_problem(const ChannelInstance& inst, Codebook codebook) {
  const int K = inst.num_users();
  RelaxedProblem pr;
  pr.gains = inst.relay();
  pr.floor = Eigen::VectorXd::Zero(K);
  if (codebook == Codebook::repetition) {
    pr.offset = Eigen::VectorXd::Ones(K) + inst.direct();
    pr.constant = Eigen::VectorXd::Zero(K);
  } else {
    pr.offset = Eigen::VectorXd::Ones(K);
    pr.constant = 0.5 * (Eigen::VectorXd::Ones(K) + inst.direct()).array().log2().matrix();
  }
  return pr;
}

}  // namespace

RelaxedProblem RelaxedProblem::make(const ChannelInstance& inst, Codebook codebook) {
  return base_problem(inst, codebook);
}

RelaxedProblem RelaxedProblem::make(const ChannelInstance& inst, Codebook codebook,
                                    const Eigen::VectorXd& target_rates) {
  if (target_rates.size() != inst.num_users())
    throw InvalidInput("target vector length does not match the number of users");
  RelaxedProblem pr = base_problem(inst, codebook);
  for (int k = 0; k < pr.users(); ++k) {
    const double r = target_rates(k);
    if (!std::isfinite(r) || r < 0.0) throw InvalidInput("targets must be finite and non-negative");
    // constant + (1/2)log2(offset + s) >= r  <=>  s >= 2^(2(r - constant)) - offset
    pr.floor(k) = std::exp2(2.0 * (r - pr.constant(k))) - pr.offset(k);
  }
  return pr;
}

Eigen::VectorXd RelaxedProblem::snr(const Eigen::MatrixXd& alpha) const {
  return (gains.cwiseProduct(alpha)).colwise().sum().transpose();
}

Eigen::VectorXd RelaxedProblem::user_rates(const Eigen::MatrixXd& alpha) const {
  const Eigen::VectorXd s = snr(alpha);
  Eigen::VectorXd r(users());
  for (int k = 0; k < users(); ++k) r(k) = constant(k) + 0.5 * std::log2(offset(k) + s(k));
  return r;
}

Eigen::VectorXd implied_budget_duals(const RelaxedProblem& pr, const Eigen::MatrixXd& alpha,
                                     const Eigen::VectorXd& gamma) {
  const Eigen::VectorXd s = pr.snr(alpha);
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(pr.relays());
  for (int j = 0; j < pr.relays(); ++j)
    for (int k = 0; k < pr.users(); ++k)
      nu(j) = std::max(nu(j), (1.0 + gamma(k)) * kRateScale * pr.gains(j, k) / (pr.offset(k) + s(k)));
  return nu;
}

double kkt_residual(const RelaxedProblem& pr, const Eigen::MatrixXd& alpha, const Duals& duals) {
  const int J = pr.relays();
  const int K = pr.users();
  if (alpha.rows() != J || alpha.cols() != K || duals.nu.size() != J || duals.gamma.size() != K)
    throw InvalidInput("kkt_residual: dimension mismatch");
  const Eigen::VectorXd s = pr.snr(alpha);
  const Eigen::VectorXd rates = pr.user_rates(alpha);
  double worst = 0.0;
  auto note = [&worst](double v) { worst = std::max(worst, std::abs(v)); };

  for (int j = 0; j < J; ++j) {
    const double nu = duals.nu(j);
    note(std::min(0.0, nu));
    double load = 0.0;
    for (int k = 0; k < K; ++k) {
      const double a = alpha(j, k);
      load += a;
      note(std::min(0.0, a));
      const double m = (1.0 + duals.gamma(k)) * kRateScale * pr.gains(j, k) / (pr.offset(k) + s(k));
      const double lambda = std::max(0.0, nu - m);
      note(std::max(0.0, m - nu));  // stationarity with lambda >= 0
      note(lambda * a);              // complementary slackness
    }
    note(std::max(0.0, load - 1.0));
    note(nu * (1.0 - load));
  }
  for (int k = 0; k < K; ++k) {
    const double g = duals.gamma(k);
    if (pr.floor(k) > 0.0) {
      const double target = pr.constant(k) + 0.5 * std::log2(pr.offset(k) + pr.floor(k));
      note(std::min(0.0, g));
      note(std::max(0.0, target - rates(k)));
      note(g * (rates(k) - target));
    } else {
      note(g);
    }
  }
  return worst;
}

namespace {

struct Support {
  // on[j*K + k]: relay j may spend power on user k.
  std::vector<char> on;
  std::vector<char> tight;
  int J = 0;
  int K = 0;
  bool operator()(int j, int k) const { return on[static_cast<std::size_t>(j * K + k)] != 0; }
  void set(int j, int k, bool v) { on[static_cast<std::size_t>(j * K + k)] = v ? 1 : 0; }
};

struct LinearSolution {
  Eigen::MatrixXd alpha;
  Eigen::VectorXd tau;  // water levels 1/nu_j; zero for relays without support
  Eigen::VectorXd gamma;
};

// Solves the KKT equalities on a fixed support. Returns false if the system is
// singular.
bool solve_on_support(const RelaxedProblem& pr, const Support& sup, LinearSolution& out) {
  const int J = pr.relays();
  const int K = pr.users();
  const double w = kRateScale;

  std::vector<int> rid(static_cast<std::size_t>(J), -1);
  int n_relays = 0;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k)
      if (sup(j, k)) {
        rid[static_cast<std::size_t>(j)] = n_relays++;
        break;
      }
  }
  // Unknowns: one water level per active relay, one entry per (relay, user)
  // pair of every user served by several relays.
  std::vector<std::vector<int>> serving(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j)
      if (sup(j, k)) serving[static_cast<std::size_t>(k)].push_back(j);
  Eigen::MatrixXi var = Eigen::MatrixXi::Constant(J, K, -1);
  int n = n_relays;
  for (int k = 0; k < K; ++k)
    if (serving[static_cast<std::size_t>(k)].size() > 1)
      for (int j : serving[static_cast<std::size_t>(k)]) var(j, k) = n++;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < J; ++j)
    if (rid[static_cast<std::size_t>(j)] >= 0) b(rid[static_cast<std::size_t>(j)]) = 1.0;

  int row = n_relays;
  for (int k = 0; k < K; ++k) {
    const auto& rel = serving[static_cast<std::size_t>(k)];
    const bool tight = sup.tight[static_cast<std::size_t>(k)] != 0;
    if (rel.empty()) continue;
    if (rel.size() == 1) {
      const int j = rel.front();
      const int r = rid[static_cast<std::size_t>(j)];
      const double p = pr.gains(j, k);
      if (tight) {
        b(r) -= pr.floor(k) / p;
      } else {
        A(r, r) += w;
        b(r) += pr.offset(k) / p;
      }
      continue;
    }
    for (int j : rel) A(rid[static_cast<std::size_t>(j)], var(j, k)) += 1.0;
    const int j0 = rel.front();
    const double p0 = pr.gains(j0, k);
    double pmax = 0.0;
    for (int j : rel) pmax = std::max(pmax, pr.gains(j, k));
    for (int j : rel) A(row, var(j, k)) = pr.gains(j, k) / pmax;
    if (tight) {
      b(row) = pr.floor(k) / pmax;
    } else {
      A(row, rid[static_cast<std::size_t>(j0)]) -= w * p0 / pmax;
      b(row) = -pr.offset(k) / pmax;
    }
    ++row;
    for (std::size_t i = 1; i < rel.size(); ++i) {
      const int j = rel[i];
      const double scale = std::max(pr.gains(j, k), p0);
      A(row, rid[static_cast<std::size_t>(j)]) = pr.gains(j, k) / scale;
      A(row, rid[static_cast<std::size_t>(j0)]) = -p0 / scale;
      ++row;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (n > 0 && !lu.isInvertible()) return false;
  const Eigen::VectorXd x = n > 0 ? Eigen::VectorXd(lu.solve(b)) : Eigen::VectorXd();
  if (n > 0 && (A * x - b).lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, b.lpNorm<Eigen::Infinity>()))
    return false;

  out.alpha = Eigen::MatrixXd::Zero(J, K);
  out.tau = Eigen::VectorXd::Zero(J);
  out.gamma = Eigen::VectorXd::Zero(K);
  for (int j = 0; j < J; ++j)
    if (rid[static_cast<std::size_t>(j)] >= 0) out.tau(j) = x(rid[static_cast<std::size_t>(j)]);
  for (int k = 0; k < K; ++k) {
    const auto& rel = serving[static_cast<std::size_t>(k)];
    const bool tight = sup.tight[static_cast<std::size_t>(k)] != 0;
    if (rel.empty()) continue;
    if (rel.size() == 1) {
      const int j = rel.front();
      const double p = pr.gains(j, k);
      out.alpha(j, k) = tight ? pr.floor(k) / p : w * out.tau(j) - pr.offset(k) / p;
    } else {
      for (int j : rel) out.alpha(j, k) = x(var(j, k));
    }
    if (tight) {
      const int j = rel.front();
      const double s = pr.floor(k);
      out.gamma(k) = (pr.offset(k) + s) / (w * pr.gains(j, k) * out.tau(j)) - 1.0;
    }
  }
  return true;
}

enum class Fix { none, drop, add, release, pin };

struct Evaluation {
  bool solved = false;
  LinearSolution sol;
  Eigen::VectorXd nu;
  double worst = 0.0;
  Fix fix = Fix::none;
  int j = -1;
  int k = -1;
};

constexpr double kViolationTol = 1e-10;

bool relay_active(const Support& sup, int j) {
  for (int k = 0; k < sup.K; ++k)
    if (sup(j, k)) return true;
  return false;
}

// Solves on the support and locates the worst violated sign condition.
Evaluation evaluate(const RelaxedProblem& pr, const Support& sup) {
  const int J = pr.relays();
  const int K = pr.users();
  const double w = kRateScale;
  Evaluation ev;
  ev.solved = solve_on_support(pr, sup, ev.sol);
  for (int j = 0; ev.solved && j < J; ++j)
    if (relay_active(sup, j) && !(ev.sol.tau(j) > 0.0)) ev.solved = false;
  if (!ev.solved) return ev;

  const Eigen::VectorXd s = pr.snr(ev.sol.alpha);
  ev.nu = Eigen::VectorXd::Zero(J);
  for (int j = 0; j < J; ++j)
    if (ev.sol.tau(j) > 0.0) ev.nu(j) = 1.0 / ev.sol.tau(j);
  ev.worst = kViolationTol;
  auto consider = [&ev](double v, Fix f, int j, int k) {
    if (v > ev.worst) {
      ev.worst = v;
      ev.fix = f;
      ev.j = j;
      ev.k = k;
    }
  };
  for (int k = 0; k < K; ++k) {
    const double g = 1.0 + ev.sol.gamma(k);
    for (int j = 0; j < J; ++j) {
      if (sup(j, k)) {
        consider(-ev.sol.alpha(j, k), Fix::drop, j, k);
      } else if (pr.gains(j, k) > 0.0) {
        const double m = g * w * pr.gains(j, k) / (pr.offset(k) + s(k));
        if (ev.nu(j) > 0.0) consider((m - ev.nu(j)) / ev.nu(j), Fix::add, j, k);
        else consider(1e6 * (1.0 + m), Fix::add, j, k);
      }
    }
    const double f = pr.floor(k);
    if (sup.tight[static_cast<std::size_t>(k)]) consider(-ev.sol.gamma(k), Fix::release, -1, k);
    else if (f > 0.0) consider((f - s(k)) / (pr.offset(k) + f), Fix::pin, -1, k);
  }
  if (ev.fix == Fix::none) ev.worst = 0.0;
  return ev;
}

// Edges (relay, user) of a path from relay `from` to user `to` through the
// support, or empty if they are not connected.
std::vector<std::pair<int, int>> support_path(const Support& sup, int from, int to) {
  const int J = sup.J;
  const int K = sup.K;
  // Nodes: relays 0..J-1, users J..J+K-1.
  std::vector<int> parent(static_cast<std::size_t>(J + K), -2);
  std::vector<int> queue{from};
  parent[static_cast<std::size_t>(from)] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (v == J + to) break;
    if (v < J) {
      for (int k = 0; k < K; ++k)
        if (sup(v, k) && parent[static_cast<std::size_t>(J + k)] == -2) {
          parent[static_cast<std::size_t>(J + k)] = v;
          queue.push_back(J + k);
        }
    } else {
      for (int j = 0; j < J; ++j)
        if (sup(j, v - J) && parent[static_cast<std::size_t>(j)] == -2) {
          parent[static_cast<std::size_t>(j)] = v;
          queue.push_back(j);
        }
    }
  }
  std::vector<std::pair<int, int>> path;
  if (parent[static_cast<std::size_t>(J + to)] == -2) return path;
  for (int v = J + to; parent[static_cast<std::size_t>(v)] != -1; v = parent[static_cast<std::size_t>(v)]) {
    const int u = parent[static_cast<std::size_t>(v)];
    path.emplace_back(std::min(u, v), std::max(u, v) - J);
  }
  return path;
}

// Some cycle of the support graph, or empty if the support is a forest.
std::vector<std::pair<int, int>> support_cycle(Support& sup) {
  for (int j = 0; j < sup.J; ++j)
    for (int k = 0; k < sup.K; ++k) {
      if (!sup(j, k)) continue;
      sup.set(j, k, false);
      std::vector<std::pair<int, int>> path = support_path(sup, j, k);
      sup.set(j, k, true);
      if (!path.empty()) {
        path.emplace_back(j, k);
        return path;
      }
    }
  return {};
}

// Removes one edge of `cycle` (never `keep`), choosing the removal whose
// solution violates the KKT signs least.
void break_cycle(const RelaxedProblem& pr, Support& sup, const std::vector<std::pair<int, int>>& cycle,
                 std::pair<int, int> keep) {
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> drop = cycle.front() == keep ? cycle.back() : cycle.front();
  for (const auto& e : cycle) {
    if (e == keep) continue;
    sup.set(e.first, e.second, false);
    const Evaluation ev = evaluate(pr, sup);
    sup.set(e.first, e.second, true);
    if (ev.solved && ev.worst < best) {
      best = ev.worst;
      drop = e;
    }
  }
  sup.set(drop.first, drop.second, false);
}

}  // namespace

std::optional<Certificate> polish_kkt(const RelaxedProblem& pr, const Eigen::MatrixXd& start,
                                      int max_rounds) {
  const int J = pr.relays();
  const int K = pr.users();
  constexpr double kSupportTol = 1e-9;

  Support sup;
  sup.J = J;
  sup.K = K;
  sup.on.assign(static_cast<std::size_t>(J * K), 0);
  sup.tight.assign(static_cast<std::size_t>(K), 0);
  const Eigen::VectorXd s0 = pr.snr(start);
  for (int k = 0; k < K; ++k) {
    bool any = false;
    for (int j = 0; j < J; ++j)
      if (start(j, k) > kSupportTol && pr.gains(j, k) > 0.0) {
        sup.set(j, k, true);
        any = true;
      }
    const double f = pr.floor(k);
    if (f > 0.0 && s0(k) <= f * (1.0 + 1e-6) + 1e-12) {
      sup.tight[static_cast<std::size_t>(k)] = 1;
      if (!any) {
        int best = -1;
        for (int j = 0; j < J; ++j)
          if (pr.gains(j, k) > 0.0 && (best < 0 || pr.gains(j, k) > pr.gains(best, k))) best = j;
        if (best < 0) return std::nullopt;
        sup.set(best, k, true);
      }
    }
  }
  // A KKT point of a generic instance is supported on a forest.
  for (auto cycle = support_cycle(sup); !cycle.empty(); cycle = support_cycle(sup))
    break_cycle(pr, sup, cycle, {-1, -1});

  for (int round = 0; round <= max_rounds; ++round) {
    // A relay whose only users are pinned at their floors cannot balance its
    // budget; release one of them.
    bool released = false;
    for (int j = 0; j < J && !released; ++j) {
      int users = 0;
      int pinned = -1;
      bool free_or_split = false;
      for (int k = 0; k < K; ++k) {
        if (!sup(j, k)) continue;
        ++users;
        int count = 0;
        for (int i = 0; i < J; ++i) count += sup(i, k) ? 1 : 0;
        if (count > 1 || !sup.tight[static_cast<std::size_t>(k)]) free_or_split = true;
        else pinned = k;
      }
      if (users > 0 && !free_or_split) {
        sup.tight[static_cast<std::size_t>(pinned)] = 0;
        released = true;
      }
    }
    if (released) continue;

    const Evaluation ev = evaluate(pr, sup);
    if (!ev.solved) return std::nullopt;
    if (ev.fix == Fix::none) {
      Certificate cert;
      cert.alpha = ev.sol.alpha.cwiseMax(0.0);
      cert.duals.nu = ev.nu;
      cert.duals.gamma = ev.sol.gamma.cwiseMax(0.0);
      cert.residual = kkt_residual(pr, cert.alpha, cert.duals);
      cert.rounds = round;
      return cert;
    }
    switch (ev.fix) {
      case Fix::drop: sup.set(ev.j, ev.k, false); break;
      case Fix::add: {
        // Entering an edge that closes a cycle pivots another edge out.
        const auto path = support_path(sup, ev.j, ev.k);
        sup.set(ev.j, ev.k, true);
        if (!path.empty()) {
          auto cycle = path;
          cycle.emplace_back(ev.j, ev.k);
          break_cycle(pr, sup, cycle, {ev.j, ev.k});
        }
        break;
      }
      case Fix::release: sup.tight[static_cast<std::size_t>(ev.k)] = 0; break;
      case Fix::pin: {
        sup.tight[static_cast<std::size_t>(ev.k)] = 1;
        bool any = false;
        for (int j = 0; j < J; ++j) any = any || sup(j, ev.k);
        if (!any) {
          int best = -1;
          double best_score = 0.0;
          for (int j = 0; j < J; ++j) {
            const double score = pr.gains(j, ev.k) * ev.sol.tau(j);
            if (pr.gains(j, ev.k) > 0.0 && (best < 0 || score > best_score)) {
              best = j;
              best_score = score;
            }
          }
          if (best < 0) return std::nullopt;
          sup.set(best, ev.k, true);
        }
        break;
      }
      case Fix::none: break;
    }
  }
  return std::nullopt;
}

}  // namespace relaysel
