// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/qp.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace sage {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kViolTol = 1e-10;
constexpr double kPivotTol = 1e-12;
}  // namespace

QpResult qp_solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& f, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& lb,
                  const Eigen::VectorXd& ub) {
  const int n = static_cast<int>(H.rows());

  // Fold finite bounds in as ordinary rows.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < A.rows(); ++i) {
    rows.push_back(A.row(i).transpose());
    rhs.push_back(b(i));
  }
  for (int i = 0; i < n; ++i) {
    if (lb.size() == n && std::isfinite(lb(i))) {
      rows.push_back(Eigen::VectorXd::Unit(n, i));
      rhs.push_back(lb(i));
    }
    if (ub.size() == n && std::isfinite(ub(i))) {
      rows.push_back(-Eigen::VectorXd::Unit(n, i));
      rhs.push_back(-ub(i));
    }
  }
  const int m = static_cast<int>(rows.size());

  const Eigen::LLT<Eigen::MatrixXd> llt(H);
  Eigen::VectorXd x = llt.solve(-f);

  std::vector<int> active;
  Eigen::VectorXd u(0);

  QpResult out;
  const int cap = 50 * (m + 1);
  for (int it = 0; it < cap; ++it) {
    out.iterations = it;

    // Most violated inactive constraint; ties on the lowest index.
    int p = -1;
    double worst = -kViolTol;
    for (int i = 0; i < m; ++i) {
      bool in_active = false;
      for (int j : active)
        if (j == i) {
          in_active = true;
          break;
        }
      if (in_active) continue;
      const double s = rows[static_cast<std::size_t>(i)].dot(x) - rhs[static_cast<std::size_t>(i)];
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) {
      out.x = x;
      return out;
    }

    const Eigen::VectorXd& a = rows[static_cast<std::size_t>(p)];
    double up = 0.0;

    for (;;) {
      const int q = static_cast<int>(active.size());
      const Eigen::VectorXd hinv_a = llt.solve(a);
      Eigen::VectorXd z, r;
      if (q == 0) {
        z = hinv_a;
        r.resize(0);
      } else {
        Eigen::MatrixXd N(n, q);
        for (int j = 0; j < q; ++j) N.col(j) = rows[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])];
        const Eigen::MatrixXd HinvN = llt.solve(N);
        const Eigen::MatrixXd G = N.transpose() * HinvN;
        r = G.ldlt().solve(N.transpose() * hinv_a);
        z = hinv_a - HinvN * r;
      }

      const double s_p = a.dot(x) - rhs[static_cast<std::size_t>(p)];
      const double zta = z.dot(a);
      const double t2 = zta > kPivotTol ? -s_p / zta : kInf;

      double t1 = kInf;
      int blocker = -1;
      for (int j = 0; j < static_cast<int>(r.size()); ++j) {
        if (r(j) > kPivotTol) {
          const double cand = u(j) / r(j);
          if (cand < t1) {
            t1 = cand;
            blocker = j;
          }
        }
      }

      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        double viol = 0.0;
        for (int i = 0; i < m; ++i)
          viol = std::max(viol, rhs[static_cast<std::size_t>(i)] -
                                    rows[static_cast<std::size_t>(i)].dot(x));
        throw Infeasible("qp_solve: constraints admit no feasible point", viol);
      }

      if (std::isfinite(t2)) x += t * z;
      if (u.size() > 0) u -= t * r;
      up += t;

      if (t == t2) {
        active.push_back(p);
        Eigen::VectorXd u2(active.size());
        u2.head(u.size()) = u;
        u2(static_cast<Eigen::Index>(u.size())) = up;
        u = u2;
        break;
      }
      // Dual step: drop the blocker and retry the same constraint.
      active.erase(active.begin() + blocker);
      Eigen::VectorXd u2(active.size());
      for (int j = 0, k = 0; j < static_cast<int>(u.size()); ++j)
        if (j != blocker) u2(k++) = u(j);
      u = u2;
    }
  }
  throw Infeasible("qp_solve: pivot cap exceeded", 0.0);
}

}  // namespace sage
