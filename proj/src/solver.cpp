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

#include "relaysel/solver.hpp"

#include "relaysel/lp.hpp"
#include "relaysel/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace relaysel {

std::vector<int> multi_relay_users(const Eigen::MatrixXd& alpha, double eps) {
  std::vector<int> out;
  for (Eigen::Index k = 0; k < alpha.cols(); ++k)
    if ((alpha.col(k).array() > eps).count() >= 2) out.push_back(static_cast<int>(k));
  return out;
}

double kkt_residual(const ChannelInstance& inst, const Eigen::MatrixXd& alpha, const Duals& duals,
                    const std::optional<MinRateTargets>& targets, Codebook codebook) {
  const RelaxedProblem pr = targets ? RelaxedProblem::make(inst, codebook, targets->r)
                                    : RelaxedProblem::make(inst, codebook);
  return kkt_residual(pr, alpha, duals);
}

namespace {

RelaxedSolution finish(const RelaxedProblem& pr, Eigen::MatrixXd alpha, Duals duals, double residual,
                       bool certified, int iterations, const SolverOptions& options, bool budget_tight) {
  RelaxedSolution sol;
  sol.rates = RateReport::from(pr.user_rates(alpha));
  sol.objective = sol.rates.sum_rate;
  sol.multi_relay_users = multi_relay_users(alpha, options.nonzero_eps);
  // A relay with no gain to anyone has nothing to spend its budget on.
  const bool every_relay_useful = (pr.gains.array() > 0.0).rowwise().any().all();
  sol.alpha = PowerAllocation(std::move(alpha), budget_tight && every_relay_useful);
  sol.duals = std::move(duals);
  sol.kkt_residual = residual;
  sol.certified = certified;
  sol.iterations = iterations;
  return sol;
}

bool polish_due(int sweep) { return sweep >= 2 && (sweep <= 12 || sweep % 8 == 0); }

// Block-coordinate ascent over relays with exact water-filling per block,
// finished by an exact solve of the KKT system on the identified support.
RelaxedSolution sum_rate_bcd(const RelaxedProblem& pr, const SolverOptions& options) {
  const int J = pr.relays();
  const int K = pr.users();
  const double tol = options.tol;
  const int rounds = 4 * (J + K) + 8;
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(J, K);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(K);
  const Eigen::VectorXd no_gamma = Eigen::VectorXd::Zero(K);
  double prev = pr.objective(alpha);
  double residual = std::numeric_limits<double>::infinity();
  Duals duals{Eigen::VectorXd::Zero(J), no_gamma};
  constexpr int kMaxStalledSweeps = 200;
  int stalled_sweeps = 0;

  for (int sweep = 1; sweep <= options.max_iters; ++sweep) {
    for (int j = 0; j < J; ++j) {
      const Eigen::VectorXd own = pr.gains.row(j).transpose().cwiseProduct(alpha.row(j).transpose());
      const Eigen::VectorXd base = pr.offset + s - own;
      const WaterfillResult wf = waterfill_relay(base, pr.gains.row(j).transpose(), 1.0);
      alpha.row(j) = wf.alpha.transpose();
      s = base - pr.offset + pr.gains.row(j).transpose().cwiseProduct(wf.alpha);
    }
    s = pr.snr(alpha);
    const double obj = pr.objective(alpha);
    duals.nu = implied_budget_duals(pr, alpha, no_gamma);
    residual = kkt_residual(pr, alpha, duals);
    if (residual <= tol) return finish(pr, alpha, duals, residual, true, sweep, options, true);

    const bool stalled = obj - prev < tol * std::max(1.0, std::abs(obj));
    stalled_sweeps = stalled ? stalled_sweeps + 1 : 0;
    if (polish_due(sweep) || stalled_sweeps == 1) {
      if (auto cert = polish_kkt(pr, alpha, rounds); cert && cert->residual <= tol)
        return finish(pr, cert->alpha, cert->duals, cert->residual, true, sweep, options, true);
    }
    // Progress below floating-point resolution: further sweeps cannot help.
    if (stalled_sweeps >= kMaxStalledSweeps) return finish(pr, alpha, duals, residual, false, sweep, options, true);
    prev = obj;
  }
  return finish(pr, alpha, duals, residual, false, options.max_iters, options, true);
}

// Maximizes theta subject to theta * need_k <= sum_j p_jk alpha_jk for users
// with need_k > 0 and unit relay budgets. Returns the allocation and theta
// (+inf when no user needs relay power).
struct ScaleLp {
  Eigen::MatrixXd alpha;
  double theta = 0.0;
  lp::Result lp;
};

ScaleLp max_scale(const Eigen::MatrixXd& gains, const Eigen::VectorXd& need) {
  const int J = static_cast<int>(gains.rows());
  const int K = static_cast<int>(gains.cols());
  ScaleLp out;
  out.alpha = Eigen::MatrixXd::Zero(J, K);
  std::vector<int> rows;
  for (int k = 0; k < K; ++k)
    if (need(k) > 0.0) rows.push_back(k);
  if (rows.empty()) {
    out.theta = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<std::pair<int, int>> vars;
  for (int j = 0; j < J; ++j)
    for (int k : rows)
      if (gains(j, k) > 0.0) vars.emplace_back(j, k);
  const auto n = static_cast<Eigen::Index>(vars.size()) + 1;
  const auto m = static_cast<Eigen::Index>(rows.size()) + J;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  std::vector<int> row_of(static_cast<std::size_t>(K), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    row_of[static_cast<std::size_t>(rows[r])] = static_cast<int>(r);
    A(static_cast<Eigen::Index>(r), n - 1) = 1.0;
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto [j, k] = vars[v];
    A(row_of[static_cast<std::size_t>(k)], static_cast<Eigen::Index>(v)) = -gains(j, k) / need(k);
    A(static_cast<Eigen::Index>(rows.size()) + j, static_cast<Eigen::Index>(v)) = 1.0;
  }
  b.tail(J).setOnes();
  c(n - 1) = 1.0;
  out.lp = lp::maximize(c, A, b);
  if (out.lp.status == lp::Status::unbounded) {
    out.theta = std::numeric_limits<double>::infinity();
    return out;
  }
  if (out.lp.status != lp::Status::optimal) throw Error("LP iteration limit reached");
  out.theta = out.lp.x(n - 1);
  for (std::size_t v = 0; v < vars.size(); ++v)
    out.alpha(vars[v].first, vars[v].second) = std::max(0.0, out.lp.x(static_cast<Eigen::Index>(v)));
  return out;
}

// max u  s.t.  u - sum_j p_jk alpha_jk <= c_k,  sum_k alpha_jk <= 1.
//
// Users whose direct SNR exceeds an upper bound on u never bind and are left
// out; every other user starts with its two strongest relays and further
// entries are priced in with the LP duals until none has positive reduced
// cost, so the final basis is optimal for the full program.
struct MaxMinLp {
  Eigen::MatrixXd alpha;
  double level = 0.0;
  Eigen::VectorXd user_duals;
  Eigen::VectorXd relay_duals;
  lp::Result lp;
  int pivots = 0;
};

MaxMinLp max_min_repetition(const Eigen::MatrixXd& gains, const Eigen::VectorXd& c) {
  const int J = static_cast<int>(gains.rows());
  const int K = static_cast<int>(gains.cols());
  MaxMinLp out;
  out.alpha = Eigen::MatrixXd::Zero(J, K);
  out.user_duals = Eigen::VectorXd::Zero(K);
  out.relay_duals = Eigen::VectorXd::Zero(J);

  // Pooling all J budgets at each user's best gain bounds the level.
  const Eigen::VectorXd best_gain = gains.colwise().maxCoeff().transpose();
  const double bound = maxmin_relay_repetition(c, best_gain, static_cast<double>(J)).level;
  std::vector<int> rows;
  for (int k = 0; k < K; ++k)
    if (c(k) < bound || !std::isfinite(bound)) rows.push_back(k);
  const auto m = static_cast<Eigen::Index>(rows.size()) + J;
  std::vector<int> row_of(static_cast<std::size_t>(K), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) row_of[static_cast<std::size_t>(rows[r])] = static_cast<int>(r);

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(J, K, false);
  for (int k : rows) {
    int first = -1;
    int second = -1;
    for (int j = 0; j < J; ++j) {
      if (!(gains(j, k) > 0.0)) continue;
      if (first < 0 || gains(j, k) > gains(first, k)) {
        second = first;
        first = j;
      } else if (second < 0 || gains(j, k) > gains(second, k)) {
        second = j;
      }
    }
    if (first >= 0) used(first, k) = true;
    if (second >= 0) used(second, k) = true;
  }

  for (;;) {
    std::vector<std::pair<int, int>> vars;
    for (int j = 0; j < J; ++j)
      for (int k : rows)
        if (used(j, k)) vars.emplace_back(j, k);
    const auto n = static_cast<Eigen::Index>(vars.size()) + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      b(static_cast<Eigen::Index>(r)) = c(rows[r]);
      A(static_cast<Eigen::Index>(r), n - 1) = 1.0;
    }
    b.tail(J).setOnes();
    for (std::size_t v = 0; v < vars.size(); ++v) {
      const auto [j, k] = vars[v];
      A(row_of[static_cast<std::size_t>(k)], static_cast<Eigen::Index>(v)) = -gains(j, k);
      A(static_cast<Eigen::Index>(rows.size()) + j, static_cast<Eigen::Index>(v)) = 1.0;
    }
    Eigen::VectorXd obj = Eigen::VectorXd::Zero(n);
    obj(n - 1) = 1.0;
    out.lp = lp::maximize(obj, A, b);
    out.pivots += out.lp.pivots;
    if (out.lp.status != lp::Status::optimal) throw Error("max-min LP did not reach optimality");

    const Eigen::VectorXd relay_duals = out.lp.duals.tail(J);
    bool priced = false;
    for (int k : rows) {
      const double y = out.lp.duals(row_of[static_cast<std::size_t>(k)]);
      for (int j = 0; j < J; ++j)
        if (!used(j, k) && gains(j, k) > 0.0 &&
            y * gains(j, k) - relay_duals(j) > 1e-11 * std::max(1.0, relay_duals(j))) {
          used(j, k) = true;
          priced = true;
        }
    }
    if (priced) continue;

    for (std::size_t v = 0; v < vars.size(); ++v)
      out.alpha(vars[v].first, vars[v].second) = std::max(0.0, out.lp.x(static_cast<Eigen::Index>(v)));
    out.level = rows.empty() ? c.minCoeff() : out.lp.x(n - 1);
    for (std::size_t r = 0; r < rows.size(); ++r) out.user_duals(rows[r]) = out.lp.duals(static_cast<Eigen::Index>(r));
    out.relay_duals = relay_duals;
    return out;
  }
}

double lp_residual(const lp::Result& r) {
  const double scale = 1.0 + std::abs(r.objective);
  return std::max({r.primal_infeasibility, r.dual_infeasibility, r.gap / scale});
}

// Removes relay power from users above their requirement by scaling their
// column down; relay budgets and the requirements stay satisfied.
void trim_to(const RelaxedProblem& pr, Eigen::MatrixXd& alpha, const Eigen::VectorXd& need) {
  const Eigen::VectorXd s = pr.snr(alpha);
  for (int k = 0; k < pr.users(); ++k) {
    const double want = std::max(0.0, need(k));
    if (s(k) > want) alpha.col(k) *= (s(k) > 0.0 ? want / s(k) : 0.0);
  }
}

}  // namespace

RelaxedSolution solve_sum_rate(const ChannelInstance& inst, const SolverOptions& options,
                               Codebook codebook) {
  options.validate();
  return sum_rate_bcd(RelaxedProblem::make(inst, codebook), options);
}

RelaxedSolution solve_sum_rate_min(const ChannelInstance& inst, const MinRateTargets& targets,
                                   const SolverOptions& options, Codebook codebook) {
  options.validate();
  const RelaxedProblem pr = RelaxedProblem::make(inst, codebook, targets.r);
  if (!pr.has_floors()) return sum_rate_bcd(pr, options);
  const int J = pr.relays();
  const int K = pr.users();

  for (int k = 0; k < K; ++k)
    if (pr.floor(k) > 0.0 && pr.gains.col(k).sum() < pr.floor(k))
      throw Infeasible("user " + std::to_string(k + 1) + " cannot reach its target even with every relay at full power");

  const ScaleLp phase1 = max_scale(pr.gains, pr.floor);
  if (phase1.theta < 1.0 - 1e-9)
    throw Infeasible("rate targets are jointly infeasible (achievable fraction " +
                     std::to_string(phase1.theta) + ")");

  const Duals zero{Eigen::VectorXd::Zero(J), Eigen::VectorXd::Zero(K)};
  const int rounds = 4 * (J + K) + 8;
  Eigen::MatrixXd start = phase1.alpha;
  int iterations = phase1.lp.pivots;
  if (phase1.theta > 1.0 + 1e-9) {
    const double theta = phase1.theta;
    const double beta = std::min(0.5, 0.5 * (1.0 - 1.0 / theta));
    Eigen::MatrixXd x0 = (1.0 - beta) * phase1.alpha;
    x0.array() += beta / (2.0 * K);
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k)
        if (pr.gains(j, k) <= 0.0) x0(j, k) = 0.0;
    BarrierResult br = solve_barrier(pr, x0);
    iterations += br.newton_steps;
    start = br.alpha;
    if (auto cert = polish_kkt(pr, start, rounds); cert && cert->residual <= options.tol)
      return finish(pr, cert->alpha, cert->duals, cert->residual, true, iterations, options, true);
    const double res = kkt_residual(pr, br.alpha, br.duals);
    return finish(pr, br.alpha, br.duals, res, res <= options.tol, iterations, options, false);
  }
  // Targets sit on the boundary of the feasible set.
  if (auto cert = polish_kkt(pr, start, rounds); cert && cert->residual <= options.tol)
    return finish(pr, cert->alpha, cert->duals, cert->residual, true, iterations, options, true);
  const double res = kkt_residual(pr, start, zero);
  return finish(pr, start, zero, res, false, iterations, options, false);
}

RelaxedSolution solve_max_min(const ChannelInstance& inst, const SolverOptions& options,
                              Codebook codebook) {
  options.validate();
  const RelaxedProblem pr = RelaxedProblem::make(inst, codebook);
  const int J = pr.relays();
  const int K = pr.users();
  const Eigen::VectorXd& c = inst.direct();

  RelaxedSolution sol;
  Eigen::MatrixXd alpha;
  Eigen::VectorXd need;
  lp::Result last;
  bool converged = true;
  int iterations = 0;

  if (codebook == Codebook::repetition) {
    const MaxMinLp mm = max_min_repetition(pr.gains, c);
    last = mm.lp;
    iterations = mm.pivots;
    alpha = mm.alpha;
    need = (mm.level - c.array()).matrix();
    sol.duals.gamma = mm.user_duals;
    sol.duals.nu = mm.relay_duals;
  } else {
    // Bisection on the common rate t; feasibility of the relay SNRs
    // s_k(t) = 2^(2t)/(1+c_k) - 1 is a max-scale LP.
    auto need_at = [&](double t) {
      Eigen::VectorXd s(K);
      for (int k = 0; k < K; ++k) s(k) = std::max(0.0, std::exp2(2.0 * t) / (1.0 + c(k)) - 1.0);
      return s;
    };
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const double direct = 0.5 * std::log2(1.0 + c(k));
      lo = std::min(lo, direct);
      hi = std::min(hi, direct + 0.5 * std::log2(1.0 + pr.gains.col(k).sum()));
    }
    converged = false;
    for (int it = 0; it < 200; ++it) {
      if (hi - lo <= options.tol * std::max(1.0, lo)) {
        converged = true;
        break;
      }
      const double mid = 0.5 * (lo + hi);
      const ScaleLp probe = max_scale(pr.gains, need_at(mid));
      iterations += probe.lp.pivots;
      if (probe.theta >= 1.0) lo = mid;
      else hi = mid;
    }
    need = need_at(lo);
    const ScaleLp final_lp = max_scale(pr.gains, need);
    iterations += final_lp.lp.pivots;
    alpha = final_lp.alpha;
    if (std::isfinite(final_lp.theta) && final_lp.theta > 0.0) alpha /= std::max(1.0, final_lp.theta);
    last = final_lp.lp;
    sol.duals.nu = last.duals.size() >= J ? Eigen::VectorXd(last.duals.tail(J)) : Eigen::VectorXd::Zero(J);
    sol.duals.gamma = Eigen::VectorXd::Zero(K);
    if (last.duals.size() > J) {
      int r = 0;
      for (int k = 0; k < K; ++k)
        if (need(k) > 0.0) sol.duals.gamma(k) = last.duals(r++);
    }
  }

  trim_to(pr, alpha, need);
  const double residual = last.x.size() > 0 ? lp_residual(last) : 0.0;
  sol.rates = RateReport::from(pr.user_rates(alpha));
  sol.objective = sol.rates.min_rate;
  sol.multi_relay_users = multi_relay_users(alpha, options.nonzero_eps);
  sol.alpha = PowerAllocation(std::move(alpha));
  sol.kkt_residual = residual;
  sol.certified = converged && residual <= options.tol;
  sol.iterations = iterations;
  return sol;
}

}  // namespace relaysel
