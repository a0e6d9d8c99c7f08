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

namespace relaysel::lp {

enum class Status { optimal, unbounded, iteration_limit };

struct Options {
  int max_pivots = 0;  // 0: 50 * (rows + cols)
  bool scale = true;
};

struct Result {
  Status status = Status::optimal;
  Eigen::VectorXd x;      // primal solution
  Eigen::VectorXd duals;  // one non-negative multiplier per constraint row
  double objective = 0.0;
  int pivots = 0;
  // Residuals measured on the unscaled data.
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double gap = 0.0;
};

/// Dense tableau simplex for  max c'x  s.t.  A x <= b, x >= 0  with b >= 0.
///
/// Starts from the slack basis, prices with Dantzig's rule and falls back to
/// Bland's rule after a run of degenerate pivots. Rows and columns are
/// equilibrated before pivoting; results are reported in the original scale.
Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                const Options& options = {});

}  // namespace relaysel::lp
