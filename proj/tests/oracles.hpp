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

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double half_log2(double x) { return 0.5 * std::log2(x); }

// Max over the grid {step * n_k : sum_k n_k = units} of sum_k f_k(n_k),
// computed exactly by max-plus convolution of the per-user tables.
// f[k][n] must be -inf where the grid point is not allowed.
inline double grid_max(const std::vector<std::vector<double>>& f, int units) {
  std::vector<double> acc = f.front();
  for (std::size_t k = 1; k < f.size(); ++k) {
    std::vector<double> next(static_cast<std::size_t>(units) + 1, -std::numeric_limits<double>::infinity());
    for (int a = 0; a <= units; ++a)
      for (int b = 0; a + b <= units; ++b)
        next[static_cast<std::size_t>(a + b)] =
            std::max(next[static_cast<std::size_t>(a + b)], acc[static_cast<std::size_t>(a)] + f[k][static_cast<std::size_t>(b)]);
    acc = std::move(next);
  }
  return acc[static_cast<std::size_t>(units)];
}

// Grid optimum of sum_k log(b_k + p_k alpha_k), alpha on the simplex of the
// given budget with the given step and floors.
inline double grid_waterfill(const Eigen::VectorXd& base, const Eigen::VectorXd& gains, double budget,
                             const Eigen::VectorXd& floors, double step) {
  const int units = static_cast<int>(std::lround(budget / step));
  std::vector<std::vector<double>> f(static_cast<std::size_t>(base.size()));
  for (Eigen::Index k = 0; k < base.size(); ++k) {
    auto& row = f[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(units) + 1);
    for (int n = 0; n <= units; ++n) {
      const double a = n * step;
      row[static_cast<std::size_t>(n)] = a + 1e-12 < floors(k) ? -std::numeric_limits<double>::infinity()
                                                                 : std::log(base(k) + gains(k) * a);
    }
  }
  return grid_max(f, units);
}

inline double waterfill_objective(const Eigen::VectorXd& base, const Eigen::VectorXd& gains,
                                  const Eigen::VectorXd& alpha) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < base.size(); ++k) s += std::log(base(k) + gains(k) * alpha(k));
  return s;
}

// Plain bisection water-filling on the level, independent of the library's
// sorted closed form.
inline Eigen::VectorXd bisection_waterfill(const Eigen::VectorXd& base, const Eigen::VectorXd& gains, double budget) {
  const Eigen::Index K = base.size();
  auto alloc = [&](double level) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
    for (Eigen::Index k = 0; k < K; ++k)
      if (gains(k) > 0.0) a(k) = std::max(0.0, level - base(k) / gains(k));
    return a;
  };
  if ((gains.array() <= 0.0).all()) return Eigen::VectorXd::Zero(K);
  double lo = 0.0, hi = budget;
  for (Eigen::Index k = 0; k < K; ++k)
    if (gains(k) > 0.0) hi = std::max(hi, budget + base(k) / gains(k));
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (alloc(mid).sum() > budget ? hi : lo) = mid;
  }
  Eigen::VectorXd a = alloc(0.5 * (lo + hi));
  if (a.sum() > 0.0) a *= budget / a.sum();
  return a;
}

// Relaxed sum rate of the repetition codebook by naive block-coordinate
// ascent with bisection water-filling, run for a fixed number of sweeps.
inline double bcd_sum_rate(const Eigen::VectorXd& c, const Eigen::MatrixXd& p, int sweeps = 4000) {
  const Eigen::Index J = p.rows(), K = p.cols();
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(J, K, 1.0 / static_cast<double>(K));
  for (int s = 0; s < sweeps; ++s)
    for (Eigen::Index j = 0; j < J; ++j) {
      Eigen::VectorXd base = Eigen::VectorXd::Ones(K) + c;
      for (Eigen::Index l = 0; l < J; ++l)
        if (l != j) base += p.row(l).transpose().cwiseProduct(alpha.row(l).transpose());
      alpha.row(j) = bisection_waterfill(base, p.row(j).transpose(), 1.0).transpose();
    }
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) total += half_log2(1.0 + c(k) + p.col(k).dot(alpha.col(k)));
  return total;
}

// Every (J x K) allocation whose rows each spend the budget on the grid of
// the given step; calls fn for each. Only for tiny J and K.
inline void for_each_grid_allocation(int J, int K, int units,
                                     const std::function<void(const Eigen::MatrixXd&)>& fn) {
  std::vector<std::vector<int>> rows;
  std::vector<int> cur(static_cast<std::size_t>(K), 0);
  std::function<void(int, int)> compose = [&](int k, int left) {
    if (k == K - 1) {
      cur[static_cast<std::size_t>(k)] = left;
      rows.push_back(cur);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      cur[static_cast<std::size_t>(k)] = n;
      compose(k + 1, left - n);
    }
  };
  compose(0, units);
  Eigen::MatrixXd alpha(J, K);
  std::vector<std::size_t> idx(static_cast<std::size_t>(J), 0);
  while (true) {
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k)
        alpha(j, k) = rows[idx[static_cast<std::size_t>(j)]][static_cast<std::size_t>(k)] / static_cast<double>(units);
    fn(alpha);
    int j = J - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == rows.size()) idx[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
}

inline Eigen::VectorXd repetition_rates(const Eigen::VectorXd& c, const Eigen::MatrixXd& p, const Eigen::MatrixXd& a) {
  Eigen::VectorXd r(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) r(k) = half_log2(1.0 + c(k) + p.col(k).dot(a.col(k)));
  return r;
}

inline Eigen::VectorXd independent_rates(const Eigen::VectorXd& c, const Eigen::MatrixXd& p, const Eigen::MatrixXd& a) {
  Eigen::VectorXd r(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) r(k) = half_log2(1.0 + c(k)) + half_log2(1.0 + p.col(k).dot(a.col(k)));
  return r;
}

// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i], my += ry[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
