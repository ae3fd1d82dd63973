// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/filters.hpp>
#include <sage/log.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sage {

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

namespace {

Eigen::Vector3d clamp_box(const Eigen::Vector3d& u, const FilterConfig& fc) {
  return {std::clamp(u.x(), fc.v_min, fc.v_max), std::clamp(u.y(), fc.v_min, fc.v_max),
          std::clamp(u.z(), fc.w_min, fc.w_max)};
}

bool in_box(const Eigen::Vector3d& u, const FilterConfig& fc, double tol = 1e-12) {
  return u.x() >= fc.v_min - tol && u.x() <= fc.v_max + tol && u.y() >= fc.v_min - tol &&
         u.y() <= fc.v_max + tol && u.z() >= fc.w_min - tol && u.z() <= fc.w_max + tol;
}

}  // namespace

ControlCommand analytical_filter(const RobotState& state, const ControlCommand& u_mpc,
                                 const FieldStack& fields, const FilterConfig& fc,
                                 const TemporalParams& tp, FilterTelemetry* telem) {
  FilterTelemetry local;
  FilterTelemetry& tl = telem ? *telem : local;
  tl = FilterTelemetry{};

  if (fields.open) {
    tl.h = std::numeric_limits<double>::infinity();
    tl.slack = std::numeric_limits<double>::infinity();
    return u_mpc;
  }

  const Sample s = sample(fields, state.x, state.y, state.psi);
  const double vnorm = s.v.norm();
  const double gnorm = s.grad.norm();
  const double sigma = sigma_scale(s.h, gnorm, vnorm, tp.eps, tp.kappa);
  const double s_psi = std::min(1.0, vnorm / (gnorm + tp.eps));

  const Eigen::Vector3d a(s.v.x(), s.v.y(), s_psi * s.dh_dpsi);
  const double c = sigma * s.dh_dt + fc.gamma * s.h;
  const Eigen::Vector3d u0 = u_mpc.vec();

  tl.h = s.h;
  tl.dh_dt = s.dh_dt;
  tl.sigma = sigma;
  tl.slack = a.dot(u0) + c;

  if (tl.slack >= 0.0 && in_box(u0, fc)) return u_mpc;

  tl.constraint_active = true;
  const double a2 = a.squaredNorm();
  if (a2 < 1e-12) {
    if (tl.slack >= 0.0) return u_mpc;
    tl.degenerate = true;
    log::warn("analytical_filter: degenerate constraint row, commanding stop");
    return ControlCommand{};
  }

  const Eigen::Vector3d u_free = u0 + std::max(0.0, -tl.slack) / a2 * a;
  if (in_box(u_free, fc)) return ControlCommand::fromVec(u_free);

  Eigen::MatrixXd A(1, 3);
  A << a.x(), a.y(), a.z();
  Eigen::VectorXd b(1);
  b << -c;
  Eigen::Vector3d lb(fc.v_min, fc.v_min, fc.w_min), ub(fc.v_max, fc.v_max, fc.w_max);
  try {
    const QpResult r = qp_solve(2.0 * Eigen::Matrix3d::Identity(), -2.0 * u0, A, b, lb, ub);
    return ControlCommand::fromVec(r.x);
  } catch (const Infeasible&) {
    tl.qp_fallback = true;
    log::warn("analytical_filter: box made the constraint infeasible, clamping projection");
    return ControlCommand::fromVec(clamp_box(u_free, fc));
  }
}

namespace {

struct PlanSample {
  double h_hat = 0.0;     // propagated value at the plan time
  Eigen::Vector3d row{0.0, 0.0, 0.0};
};

PlanSample plan_sample(const FieldStack& fields, const Eigen::Vector3d& z, double t_k,
                       const TemporalParams& tp) {
  const Sample s = sample_clamped(fields, z.x(), z.y(), z.z());
  const double sigma = sigma_scale(s.h, s.grad.norm(), s.v.norm(), tp.eps, tp.kappa);
  PlanSample ps;
  // Only adverse field motion is propagated: relief from a receding obstacle
  // must not let the plan undercut the decay condition on the current field.
  ps.h_hat = s.h + std::min(sigma * s.dh_dt, 0.0) * t_k;
  ps.row = Eigen::Vector3d(s.v.x(), s.v.y(), s.dh_dpsi);
  return ps;
}

double plan_violation(const FieldStack& fields, const std::vector<Eigen::Vector3d>& states,
                      double rho, double dt, const TemporalParams& tp) {
  double sum = 0.0;
  PlanSample prev = plan_sample(fields, states[0], 0.0, tp);
  for (std::size_t k = 1; k < states.size(); ++k) {
    const PlanSample cur = plan_sample(fields, states[k], k * dt, tp);
    sum += std::max(0.0, rho * prev.h_hat - cur.h_hat);
    prev = cur;
  }
  return sum;
}

std::vector<Eigen::Vector3d> rollout(const RobotState& state, const Eigen::VectorXd& U,
                                     double dt) {
  const int N = static_cast<int>(U.size()) / 3;
  std::vector<Eigen::Vector3d> z(static_cast<std::size_t>(N) + 1);
  z[0] = Eigen::Vector3d(state.x, state.y, state.psi);
  for (int k = 0; k < N; ++k) z[static_cast<std::size_t>(k) + 1] = z[static_cast<std::size_t>(k)] + dt * U.segment<3>(3 * k);
  return z;
}

}  // namespace

MpcResult mpc_filter(const RobotState& state, const ControlCommand& u_nom,
                     const FieldStack& fields, const FilterConfig& fc,
                     const TemporalParams& tp) {
  MpcResult out;
  const int N = fc.horizon;
  const double dt = fc.dt;
  const double rho = std::exp(-fc.gamma * dt);

  const Eigen::Vector3d un = u_nom.vec();
  const Eigen::Vector3d un_c = clamp_box(un, fc);

  if (fields.open) {
    Eigen::VectorXd U(3 * N);
    for (int k = 0; k < N; ++k) U.segment<3>(3 * k) = un_c;
    out.states = rollout(state, U, dt);
    for (int k = 0; k < N; ++k) out.inputs.push_back(un_c);
    out.u0 = ControlCommand::fromVec(un_c);
    out.converged = true;
    return out;
  }
  if (!fields.containsPoint(state.x, state.y))
    throw OutOfBounds("mpc_filter: state outside the field grid");

  const Eigen::Matrix3d P = Eigen::Vector3d(fc.p_u[0], fc.p_u[1], fc.p_u[2]).asDiagonal();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3 * N, 3 * N);
  Eigen::VectorXd f(3 * N), lb(3 * N), ub(3 * N);
  for (int k = 0; k < N; ++k) {
    H.block<3, 3>(3 * k, 3 * k) = 2.0 * P;
    f.segment<3>(3 * k) = -2.0 * P * un;
    lb.segment<3>(3 * k) = Eigen::Vector3d(fc.v_min, fc.v_min, fc.w_min);
    ub.segment<3>(3 * k) = Eigen::Vector3d(fc.v_max, fc.v_max, fc.w_max);
  }

  Eigen::VectorXd U(3 * N);
  for (int k = 0; k < N; ++k) U.segment<3>(3 * k) = un_c;

  const double mu = 1e3;
  auto merit = [&](const Eigen::VectorXd& cand) {
    double cost = 0.0;
    for (int k = 0; k < N; ++k) {
      const Eigen::Vector3d d = cand.segment<3>(3 * k) - un;
      cost += d.dot(P * d);
    }
    return cost + mu * plan_violation(fields, rollout(state, cand, dt), rho, dt, tp);
  };

  for (int it = 1; it <= fc.sqp_max_iters; ++it) {
    out.iterations = it;
    const auto zbar = rollout(state, U, dt);
    std::vector<PlanSample> ps(zbar.size());
    for (std::size_t k = 0; k < zbar.size(); ++k)
      ps[k] = plan_sample(fields, zbar[k], static_cast<double>(k) * dt, tp);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, 3 * N);
    Eigen::VectorXd b(N);
    for (int k = 0; k < N; ++k) {
      const auto& ak1 = ps[static_cast<std::size_t>(k) + 1].row;
      const auto& ak = ps[static_cast<std::size_t>(k)].row;
      for (int j = 0; j < k; ++j)
        A.block<1, 3>(k, 3 * j) = dt * (ak1 - rho * ak).transpose();
      A.block<1, 3>(k, 3 * k) = dt * ak1.transpose();
      b(k) = A.row(k).dot(U) -
             (ps[static_cast<std::size_t>(k) + 1].h_hat - rho * ps[static_cast<std::size_t>(k)].h_hat);
    }

    Eigen::VectorXd U_star;
    try {
      U_star = qp_solve(H, f, A, b, lb, ub).x;
    } catch (const Infeasible&) {
      out.infeasible = true;
      FilterTelemetry tl;
      out.u0 = analytical_filter(state, ControlCommand::fromVec(un_c), fields, fc, tp, &tl);
      out.states = rollout(state, U, dt);
      for (int k = 0; k < N; ++k) out.inputs.push_back(U.segment<3>(3 * k));
      log::warn("mpc_filter: QP infeasible, returning analytical fallback");
      return out;
    }

    const Eigen::VectorXd d = U_star - U;
    if (d.lpNorm<Eigen::Infinity>() < fc.tol) {
      U = U_star;  // keep the iterate the final QP certified feasible
      out.converged = true;
      break;
    }

    const double phi0 = merit(U);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls) {
      if (merit(U + alpha * d) <= phi0 - 1e-4 * alpha * d.squaredNorm()) {
        accepted = true;
        break;
      }
      alpha *= fc.ls_shrink;
    }
    if (!accepted) break;
    U += alpha * d;
  }

  out.states = rollout(state, U, dt);
  for (int k = 0; k < N; ++k) out.inputs.push_back(U.segment<3>(3 * k));
  out.u0 = ControlCommand::fromVec(U.segment<3>(0));
  return out;
}

}  // namespace sage
