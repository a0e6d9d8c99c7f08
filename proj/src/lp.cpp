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

#include "relaysel/lp.hpp"

#include "relaysel/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace relaysel::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kOptTol = 1e-12;
constexpr int kDegenerateRun = 40;

// Geometric-mean equilibration of the nonzero pattern.
void equilibrate(const Eigen::MatrixXd& A, Eigen::VectorXd& row_scale, Eigen::VectorXd& col_scale) {
  const Eigen::Index m = A.rows(), n = A.cols();
  row_scale = Eigen::VectorXd::Ones(m);
  col_scale = Eigen::VectorXd::Ones(n);
  for (int pass = 0; pass < 6; ++pass) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = std::abs(A(i, j)) * row_scale(i) * col_scale(j);
        if (v > 0.0) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (hi > 0.0) row_scale(i) /= std::sqrt(lo * hi);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double v = std::abs(A(i, j)) * row_scale(i) * col_scale(j);
        if (v > 0.0) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (hi > 0.0) col_scale(j) /= std::sqrt(lo * hi);
    }
  }
}

class Tableau {
public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(A.rows()), n_(A.cols()), width_(n_ + m_ + 1), data_(static_cast<std::size_t>((m_ + 1) * width_), 0.0),
        basis_(static_cast<std::size_t>(m_)) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) at(i, j) = A(i, j);
      at(i, n_ + i) = 1.0;
      at(i, width_ - 1) = b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
    for (Eigen::Index j = 0; j < n_; ++j) at(m_, j) = -c(j);
  }

  double& at(Eigen::Index i, Eigen::Index j) { return data_[static_cast<std::size_t>(i * width_ + j)]; }
  double at(Eigen::Index i, Eigen::Index j) const {
    return data_[static_cast<std::size_t>(i * width_ + j)];
  }

  Status run(int max_pivots, int& pivots) {
    int degenerate = 0;
    bool bland = false;
    double cost_scale = 1.0;
    for (Eigen::Index j = 0; j < n_; ++j) cost_scale = std::max(cost_scale, std::abs(at(m_, j)));
    const double opt_tol = kOptTol * cost_scale;

    for (pivots = 0; pivots < max_pivots; ++pivots) {
      const Eigen::Index enter = choose_entering(bland, opt_tol);
      if (enter < 0) return Status::optimal;
      const Eigen::Index leave = choose_leaving(enter, bland);
      if (leave < 0) return Status::unbounded;

      const double step = at(leave, width_ - 1) / at(leave, enter);
      if (step <= 1e-14) {
        if (++degenerate > kDegenerateRun) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
    return Status::iteration_limit;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index v = basis_[static_cast<std::size_t>(i)];
      if (v < n_) x(v) = std::max(0.0, at(i, width_ - 1));
    }
    return x;
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd y(m_);
    for (Eigen::Index i = 0; i < m_; ++i) y(i) = std::max(0.0, at(m_, n_ + i));
    return y;
  }

private:
  Eigen::Index choose_entering(bool bland, double opt_tol) const {
    Eigen::Index best = -1;
    double best_val = -opt_tol;
    for (Eigen::Index j = 0; j < n_ + m_; ++j) {
      const double d = at(m_, j);
      if (d < best_val) {
        best = j;
        if (bland) return best;
        best_val = d;
      }
    }
    return best;
  }

  Eigen::Index choose_leaving(Eigen::Index enter, bool bland) const {
    double col_scale = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) col_scale = std::max(col_scale, std::abs(at(i, enter)));
    const double tol = kPivotTol * std::max(1.0, col_scale);
    Eigen::Index best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double a = at(i, enter);
      if (a <= tol) continue;
      const double ratio = std::max(0.0, at(i, width_ - 1)) / a;
      if (best < 0 || ratio < best_ratio - 1e-13 * std::max(1.0, best_ratio)) {
        best = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-13 * std::max(1.0, best_ratio)) {
        const bool better = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(best)]
                                  : a > at(best, enter);
        if (better) {
          best = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    return best;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    double* pr = &data_[static_cast<std::size_t>(row * width_)];
    const double inv = 1.0 / pr[col];
    nonzero_.clear();
    for (Eigen::Index j = 0; j < width_; ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        nonzero_.push_back(j);
      }
    }
    pr[col] = 1.0;
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      double* pi = &data_[static_cast<std::size_t>(i * width_)];
      const double f = pi[col];
      if (f == 0.0) continue;
      for (Eigen::Index j : nonzero_) pi[j] -= f * pr[j];
      pi[col] = 0.0;
      if (i < m_ && pi[width_ - 1] < 0.0 && pi[width_ - 1] > -1e-13) pi[width_ - 1] = 0.0;
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::Index m_, n_, width_;
  std::vector<double> data_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> nonzero_;
};

// Recomputes the vertex and its duals from the final basis with one dense
// factorization, removing the rounding error accumulated by the pivots.
void refine_vertex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                   const std::vector<Eigen::Index>& basis, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const Eigen::Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index v = basis[static_cast<std::size_t>(i)];
    if (v < n) {
      B.col(i) = A.col(v);
      cb(i) = c(v);
    } else {
      B(v - n, i) = 1.0;
      cb(i) = 0.0;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const Eigen::VectorXd xb = lu.solve(b);
  const Eigen::VectorXd yb = lu.transpose().solve(cb);
  if (!xb.allFinite() || !yb.allFinite()) return;
  const double tol = 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (xb.minCoeff() < -tol || yb.minCoeff() < -1e-9 * std::max(1.0, c.lpNorm<Eigen::Infinity>())) return;
  x.setZero();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index v = basis[static_cast<std::size_t>(i)];
    if (v < n) x(v) = std::max(0.0, xb(i));
  }
  y = yb.cwiseMax(0.0);
}

}  // namespace

Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                const Options& options) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (c.size() != n || b.size() != m) throw InvalidInput("lp: dimension mismatch");
  if ((b.array() < 0.0).any()) throw InvalidInput("lp: right-hand side must be non-negative");
  if (!A.array().isFinite().all() || !b.array().isFinite().all() || !c.array().isFinite().all())
    throw InvalidInput("lp: non-finite data");

  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m), col_scale = Eigen::VectorXd::Ones(n);
  if (options.scale) equilibrate(A, row_scale, col_scale);
  const Eigen::MatrixXd As = row_scale.asDiagonal() * A * col_scale.asDiagonal();
  const Eigen::VectorXd bs = row_scale.cwiseProduct(b);
  const Eigen::VectorXd cs = col_scale.cwiseProduct(c);

  Tableau tableau(As, bs, cs);
  Result out;
  const int limit = options.max_pivots > 0 ? options.max_pivots : static_cast<int>(50 * (m + n) + 100);
  out.status = tableau.run(limit, out.pivots);
  Eigen::VectorXd xs = tableau.primal();
  Eigen::VectorXd ys = tableau.duals();
  if (out.status == Status::optimal && m > 0) refine_vertex(As, bs, cs, tableau.basis(), xs, ys);
  out.x = col_scale.cwiseProduct(xs);
  out.duals = row_scale.cwiseProduct(ys);
  out.objective = c.dot(out.x);

  const Eigen::VectorXd slack = b - A * out.x;
  out.primal_infeasibility = std::max(0.0, -slack.minCoeff());
  const Eigen::VectorXd reduced = A.transpose() * out.duals - c;
  out.dual_infeasibility = n > 0 ? std::max(0.0, -reduced.minCoeff()) : 0.0;
  out.gap = std::abs(b.dot(out.duals) - out.objective);
  return out;
}

}  // namespace relaysel::lp
