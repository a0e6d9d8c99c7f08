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

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace relaysel {

namespace {

struct Layout {
  // Only entries with a positive gain are optimized; the rest stay zero.
  std::vector<int> relay;
  std::vector<int> user;
  std::vector<std::vector<int>> of_user;
  std::vector<std::vector<int>> of_relay;
};

Layout make_layout(const RelaxedProblem& pr) {
  Layout lay;
  lay.of_user.resize(static_cast<std::size_t>(pr.users()));
  lay.of_relay.resize(static_cast<std::size_t>(pr.relays()));
  for (int j = 0; j < pr.relays(); ++j)
    for (int k = 0; k < pr.users(); ++k)
      if (pr.gains(j, k) > 0.0) {
        const int i = static_cast<int>(lay.relay.size());
        lay.relay.push_back(j);
        lay.user.push_back(k);
        lay.of_user[static_cast<std::size_t>(k)].push_back(i);
        lay.of_relay[static_cast<std::size_t>(j)].push_back(i);
      }
  return lay;
}

class Barrier {
public:
  Barrier(const RelaxedProblem& pr, const Layout& lay) : pr_(pr), lay_(lay) {
    for (int k = 0; k < pr.users(); ++k)
      if (pr.floor(k) > 0.0) constrained_.push_back(k);
  }

  int constraints() const {
    return static_cast<int>(lay_.relay.size()) + pr_.relays() + static_cast<int>(constrained_.size());
  }

  void aggregates(const Eigen::VectorXd& x, Eigen::VectorXd& s, Eigen::VectorXd& load) const {
    s = Eigen::VectorXd::Zero(pr_.users());
    load = Eigen::VectorXd::Zero(pr_.relays());
    for (std::size_t i = 0; i < lay_.relay.size(); ++i) {
      const int j = lay_.relay[i];
      const int k = lay_.user[i];
      s(k) += pr_.gains(j, k) * x(static_cast<Eigen::Index>(i));
      load(j) += x(static_cast<Eigen::Index>(i));
    }
  }

  // +inf outside the domain.
  double value(double t, const Eigen::VectorXd& x) const {
    if ((x.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    Eigen::VectorXd s, load;
    aggregates(x, s, load);
    double f = 0.0;
    for (int j = 0; j < pr_.relays(); ++j) {
      if (load(j) >= 1.0) return std::numeric_limits<double>::infinity();
      f -= std::log1p(-load(j));
    }
    for (int k : constrained_) {
      const double slack = s(k) - pr_.floor(k);
      if (slack <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(slack);
    }
    for (int k = 0; k < pr_.users(); ++k) f -= t * kRateScale * std::log(pr_.offset(k) + s(k));
    f -= x.array().log().sum();
    return f;
  }

  void derivatives(double t, const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
    const Eigen::Index n = x.size();
    Eigen::VectorXd s, load;
    aggregates(x, s, load);
    g.resize(n);
    H = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i) = -1.0 / x(i);
      H(i, i) = 1.0 / (x(i) * x(i));
    }
    for (int j = 0; j < pr_.relays(); ++j) {
      const double inv = 1.0 / (1.0 - load(j));
      for (int a : lay_.of_relay[static_cast<std::size_t>(j)]) {
        g(a) += inv;
        for (int b : lay_.of_relay[static_cast<std::size_t>(j)]) H(a, b) += inv * inv;
      }
    }
    for (int k = 0; k < pr_.users(); ++k) {
      const double u = 1.0 / (pr_.offset(k) + s(k));
      double lin = -t * kRateScale * u;
      double quad = t * kRateScale * u * u;
      if (pr_.floor(k) > 0.0) {
        const double v = 1.0 / (s(k) - pr_.floor(k));
        lin -= v;
        quad += v * v;
      }
      const auto& idx = lay_.of_user[static_cast<std::size_t>(k)];
      for (int a : idx) {
        const double pa = pr_.gains(lay_.relay[static_cast<std::size_t>(a)], k);
        g(a) += lin * pa;
        for (int b : idx) H(a, b) += quad * pa * pr_.gains(lay_.relay[static_cast<std::size_t>(b)], k);
      }
    }
  }

  // Largest step keeping the iterate strictly inside the domain.
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    double step = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (d(i) < 0.0) step = std::min(step, -x(i) / d(i));
    Eigen::VectorXd s, load, ds, dload;
    aggregates(x, s, load);
    aggregates(d, ds, dload);
    for (int j = 0; j < pr_.relays(); ++j)
      if (dload(j) > 0.0) step = std::min(step, (1.0 - load(j)) / dload(j));
    for (int k : constrained_)
      if (ds(k) < 0.0) step = std::min(step, (s(k) - pr_.floor(k)) / -ds(k));
    return step;
  }

  Duals duals(double t, const Eigen::VectorXd& x) const {
    Eigen::VectorXd s, load;
    aggregates(x, s, load);
    Duals d;
    d.nu = (1.0 / (t * (1.0 - load.array()))).matrix();
    d.gamma = Eigen::VectorXd::Zero(pr_.users());
    for (int k : constrained_)
      d.gamma(k) = (pr_.offset(k) + s(k)) / (kRateScale * t * (s(k) - pr_.floor(k)));
    return d;
  }

private:
  const RelaxedProblem& pr_;
  const Layout& lay_;
  std::vector<int> constrained_;
};

}  // namespace

BarrierResult solve_barrier(const RelaxedProblem& pr, const Eigen::MatrixXd& start,
                            const BarrierOptions& options) {
  const Layout lay = make_layout(pr);
  const Barrier barrier(pr, lay);
  const auto n = static_cast<Eigen::Index>(lay.relay.size());
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x(i) = start(lay.relay[static_cast<std::size_t>(i)], lay.user[static_cast<std::size_t>(i)]);

  BarrierResult result;
  double t = 1.0;
  if (!std::isfinite(barrier.value(t, x)))
    throw InvalidInput("barrier start point is not strictly feasible");

  const double m = barrier.constraints();
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  bool done = false;
  while (!done && result.newton_steps < options.max_newton) {
    // Centering.
    for (int it = 0; it < 100 && result.newton_steps < options.max_newton; ++it) {
      barrier.derivatives(t, x, g, H);
      Eigen::VectorXd d;
      Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() == Eigen::Success) d = -llt.solve(g);
      else d = -Eigen::LDLT<Eigen::MatrixXd>(H).solve(g);
      ++result.newton_steps;
      const double decrement = -g.dot(d);
      if (!(decrement > 2e-12)) break;
      double step = std::min(1.0, 0.99 * barrier.max_step(x, d));
      const double f0 = barrier.value(t, x);
      while (step > 1e-16) {
        const double f1 = barrier.value(t, x + step * d);
        if (f1 <= f0 - 0.25 * step * decrement) break;
        step *= 0.5;
      }
      if (step <= 1e-16) break;
      x += step * d;
    }
    if (m / t < options.gap) {
      done = true;
      break;
    }
    t *= options.growth;
  }

  result.converged = done;
  result.alpha = Eigen::MatrixXd::Zero(pr.relays(), pr.users());
  for (Eigen::Index i = 0; i < n; ++i)
    result.alpha(lay.relay[static_cast<std::size_t>(i)], lay.user[static_cast<std::size_t>(i)]) = x(i);
  result.duals = barrier.duals(t, x);
  return result;
}

}  // namespace relaysel
