// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/fields.hpp>
#include <sage/qp.hpp>

#include <vector>

namespace sage {

struct RobotState {
  double x = 0.0, y = 0.0, psi = 0.0;
};

struct ControlCommand {
  double vx = 0.0, vy = 0.0, omega = 0.0;

  Eigen::Vector3d vec() const { return {vx, vy, omega}; }
  static ControlCommand fromVec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

// Wraps to (-pi, pi].
double wrap_angle(double a);

struct FilterTelemetry {
  double h = 0.0;
  double dh_dt = 0.0;
  double sigma = 1.0;
  double slack = 0.0;  // constraint value at the incoming command
  bool constraint_active = false;
  bool degenerate = false;   // zero constraint row while violated: safe stop
  bool qp_fallback = false;  // box interaction made the QP infeasible
};

// Minimal deviation from u_mpc subject to the guidance safety row
//   [v, s_psi * dh/dpsi] . u + sigma * dh/dt >= -gamma * h
// and the input box. Closed-form projection when the box stays inactive,
// dense QP otherwise. s_psi shrinks the yaw column in open space the same way
// sigma shrinks the time derivative.
ControlCommand analytical_filter(const RobotState& state, const ControlCommand& u_mpc,
                                 const FieldStack& fields, const FilterConfig& fc,
                                 const TemporalParams& tp, FilterTelemetry* telem = nullptr);

struct MpcResult {
  ControlCommand u0;
  std::vector<Eigen::Vector3d> states;  // rollout, size N+1 (current state first)
  std::vector<Eigen::Vector3d> inputs;  // size N
  bool converged = false;
  bool infeasible = false;
  int iterations = 0;
};

// Predictive filter over N single-integrator steps: quadratic deviation cost
// from u_nom, box bounds, and per-step linearized decay constraints
//   h(z_{k+1}) >= exp(-gamma dt) h(z_k)
// with rows [v, dh/dpsi] sampled along the incumbent plan and h propagated by
// sigma * dh/dt * t_k. SQP with backtracking line search; when the QP turns
// infeasible the analytical filter's output is returned instead.
MpcResult mpc_filter(const RobotState& state, const ControlCommand& u_nom,
                     const FieldStack& fields, const FilterConfig& fc, const TemporalParams& tp);

}  // namespace sage
