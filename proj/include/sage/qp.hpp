// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace sage {

struct QpResult {
  Eigen::VectorXd x;
  int iterations = 0;
};

// min 1/2 x'Hx + f'x  s.t.  A x >= b  and  lb <= x <= ub.
//
// H must be symmetric positive definite; sizes stay small (tens of variables),
// so factorizations are recomputed per pivot. Dual active-set iteration with a
// deterministic pivot order: most violated constraint first, ties broken on
// the lowest row index; finite bounds are folded in as rows after A. Throws
// Infeasible carrying the largest violation when no feasible point exists.
QpResult qp_solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& f, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& lb,
                  const Eigen::VectorXd& ub);

}  // namespace sage
