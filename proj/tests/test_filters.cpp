// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/filters.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sage;

namespace {

// Planar field around a wall at x = wall_x: h = slope * (wall_x - x), guidance
// pointing away from the wall with magnitude v0. Linear layers make trilinear
// sampling exact, so filter behavior can be checked in closed form.
FieldStack wall_stack(double slope, double v0, double dhdt_val, double wall_x = 2.0) {
  const int w = 60, hh = 40, n_psi = 4;
  const double res = 0.05;
  FieldStack st;
  st.origin = {0, 0};
  st.resolution = res;
  st.width = w;
  st.height = hh;
  st.n_psi = n_psi;
  st.h_max = slope * wall_x;
  st.max_grad = slope;
  GridU8 layout({0, 0}, res, w, hh);
  for (int l = 0; l < n_psi; ++l) {
    GridF hg({0, 0}, res, w, hh);
    GuidanceSlice v(layout);
    SafetySlice ss(hg);
    GridF dps({0, 0}, res, w, hh);
    GridF dht({0, 0}, res, w, hh, dhdt_val);
    GridU8 free({0, 0}, res, w, hh);
    for (int iy = 0; iy < hh; ++iy)
      for (int ix = 0; ix < w; ++ix) {
        const Eigen::Vector2d q = hg.cellCenter(ix, iy);
        ss.h(ix, iy) = slope * (wall_x - q.x());
        ss.gx(ix, iy) = -slope;
        ss.gy(ix, iy) = 0.0;
        v.vx(ix, iy) = -v0;
        v.vy(ix, iy) = 0.0;
        free(ix, iy) = q.x() < wall_x ? 1 : 0;
      }
    st.v.push_back(std::move(v));
    st.s.push_back(std::move(ss));
    st.dpsi.push_back(std::move(dps));
    st.dhdt.push_back(std::move(dht));
    st.free.push_back(std::move(free));
  }
  return st;
}

FieldStack uniform_stack(double h, const Eigen::Vector2d& grad, const Eigen::Vector2d& v,
                         double dpsi, double dhdt_val) {
  FieldStack st = wall_stack(1.0, 1.0, 0.0);
  for (int l = 0; l < st.n_psi; ++l) {
    auto& sl = st.s[static_cast<std::size_t>(l)];
    sl.h.fill(h);
    sl.gx.fill(grad.x());
    sl.gy.fill(grad.y());
    st.v[static_cast<std::size_t>(l)].vx.fill(v.x());
    st.v[static_cast<std::size_t>(l)].vy.fill(v.y());
    st.dpsi[static_cast<std::size_t>(l)].fill(dpsi);
    st.dhdt[static_cast<std::size_t>(l)].fill(dhdt_val);
  }
  st.h_max = std::max(h, 0.0);
  st.max_grad = grad.norm();
  return st;
}

}  // namespace

TEST_CASE("angles wrap into the half-open interval") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(wrap_angle(-7 * M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("a satisfied constraint returns the command untouched") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const RobotState z{0.5, 1.0, 0.0};  // far from the wall: gamma h = 1.5
  const ControlCommand u{0.8, -0.3, 0.4};
  FilterTelemetry tl;
  const ControlCommand out = analytical_filter(z, u, st, fc, tp, &tl);
  CHECK(out.vx == u.vx);
  CHECK(out.vy == u.vy);
  CHECK(out.omega == u.omega);
  CHECK(!tl.constraint_active);
  CHECK(tl.slack > 0.0);
  CHECK(tl.h == doctest::Approx(1.5));
}

TEST_CASE("a violated constraint matches the dense QP oracle") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const RobotState z{1.9, 1.0, 0.0};  // gamma h = 0.1, wall dead ahead
  const ControlCommand u{0.9, 0.2, 0.1};
  FilterTelemetry tl;
  const ControlCommand out = analytical_filter(z, u, st, fc, tp, &tl);
  CHECK(tl.constraint_active);

  // Oracle: min ||u' - u||^2 s.t. a.u' + c >= 0 plus the box.
  const Sample s = sample(st, z.x, z.y, z.psi);
  const double sigma = sigma_scale(s.h, s.grad.norm(), s.v.norm(), tp.eps, tp.kappa);
  const double s_psi = std::min(1.0, s.v.norm() / (s.grad.norm() + tp.eps));
  Eigen::MatrixXd A(1, 3);
  A << s.v.x(), s.v.y(), s_psi * s.dh_dpsi;
  Eigen::VectorXd b(1);
  b << -(sigma * s.dh_dt + fc.gamma * s.h);
  const QpResult r = qp_solve(2.0 * Eigen::Matrix3d::Identity(), -2.0 * u.vec(), A, b,
                              Eigen::Vector3d(fc.v_min, fc.v_min, fc.w_min),
                              Eigen::Vector3d(fc.v_max, fc.v_max, fc.w_max));
  CHECK((out.vec() - r.x).norm() < 1e-9);
  // The filtered command satisfies the row with equality (active projection).
  CHECK(A.row(0).dot(out.vec()) == doctest::Approx(b(0)));
}

TEST_CASE("at the boundary the guidance row blocks inward motion") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const RobotState z{2.0, 1.0, 0.0};  // h = 0 exactly
  const ControlCommand u{1.0, 0.0, 0.0};
  const ControlCommand out = analytical_filter(z, u, st, fc, tp);
  const Sample s = sample(st, z.x, z.y, z.psi);
  CHECK(s.h == doctest::Approx(0.0));
  CHECK(s.v.dot(Eigen::Vector2d(out.vx, out.vy)) >= -1e-12);
}

TEST_CASE("a zero row with a violated constraint commands a safe stop") {
  const FieldStack st = uniform_stack(0.0, {0, 0}, {0, 0}, 0.0, -1.0);
  FilterConfig fc;
  TemporalParams tp;
  FilterTelemetry tl;
  const ControlCommand out = analytical_filter({1.0, 1.0, 0.0}, {0.5, 0.5, 0.5}, st, fc, tp, &tl);
  CHECK(tl.degenerate);
  CHECK(out.vx == 0.0);
  CHECK(out.vy == 0.0);
  CHECK(out.omega == 0.0);
}

TEST_CASE("an unsatisfiable box falls back to the clamped projection") {
  // Required retreat speed 2 m/s exceeds the 1 m/s box everywhere.
  const FieldStack st = uniform_stack(0.0, {-1.0, 0.0}, {-1.0, 0.0}, 0.0, -2.0);
  FilterConfig fc;
  TemporalParams tp;
  tp.eps = 0.5;
  FilterTelemetry tl;
  const ControlCommand out = analytical_filter({1.0, 1.0, 0.0}, {0.0, 0.0, 0.0}, st, fc, tp, &tl);
  CHECK(tl.qp_fallback);
  CHECK(out.vx == fc.v_min);  // best effort along the row direction
}

TEST_CASE("an open field passes commands through both filters") {
  FieldStack st;
  st.open = true;
  FilterConfig fc;
  TemporalParams tp;
  FilterTelemetry tl;
  const ControlCommand u{0.3, -0.2, 0.9};
  const ControlCommand out = analytical_filter({0, 0, 0}, u, st, fc, tp, &tl);
  CHECK(out.vx == u.vx);
  CHECK(std::isinf(tl.h));
  const MpcResult m = mpc_filter({0, 0, 0}, u, st, fc, tp);
  CHECK(m.converged);
  CHECK(m.u0.vx == doctest::Approx(u.vx));
  CHECK(m.u0.omega == doctest::Approx(u.omega));
}

TEST_CASE("far from obstacles the MPC returns the nominal command") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const ControlCommand u{0.4, 0.3, -0.2};
  const MpcResult m = mpc_filter({0.4, 1.0, 0.0}, u, st, fc, tp);
  CHECK(m.converged);
  CHECK(!m.infeasible);
  CHECK(std::abs(m.u0.vx - u.vx) < 1e-6);
  CHECK(std::abs(m.u0.vy - u.vy) < 1e-6);
  CHECK(std::abs(m.u0.omega - u.omega) < 1e-6);
  REQUIRE(m.states.size() == static_cast<std::size_t>(fc.horizon) + 1);
}

TEST_CASE("a one-step MPC matches a brute-force search over the input box") {
  const double slope = 1.0, v0 = 1.0, wall_x = 2.0;
  const FieldStack st = wall_stack(slope, v0, 0.0, wall_x);
  FilterConfig fc;
  fc.horizon = 1;
  TemporalParams tp;
  const RobotState z{1.85, 1.0, 0.0};
  const ControlCommand u_nom{1.0, 0.2, 0.3};
  const MpcResult m = mpc_filter(z, u_nom, st, fc, tp);
  REQUIRE(m.converged);

  // Brute force on the true sampled constraint h(z1) >= rho h(z0). The layers
  // are linear, so sampling is the closed form slope * (wall_x - x).
  const double rho = std::exp(-fc.gamma * fc.dt);
  const double h0 = slope * (wall_x - z.x);
  double best = 1e300;
  Eigen::Vector3d best_u(0, 0, 0);
  for (double ux = fc.v_min; ux <= fc.v_max + 1e-9; ux += 0.01)
    for (double uy = fc.v_min; uy <= fc.v_max + 1e-9; uy += 0.01)
      for (double uw = fc.w_min; uw <= fc.w_max + 1e-9; uw += 0.01) {
        const double h1 = slope * (wall_x - (z.x + fc.dt * ux));
        if (h1 < rho * h0) continue;
        const Eigen::Vector3d du(ux - u_nom.vx, uy - u_nom.vy, uw - u_nom.omega);
        const double cost = du.squaredNorm();
        if (cost < best) {
          best = cost;
          best_u = Eigen::Vector3d(ux, uy, uw);
        }
      }
  CHECK((m.u0.vec() - best_u).norm() < 0.02);
}

TEST_CASE("a head-on plan decays no faster than the discrete condition allows") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const RobotState z{1.4, 1.0, 0.0};
  const MpcResult m = mpc_filter(z, {1.0, 0.0, 0.0}, st, fc, tp);
  REQUIRE(m.converged);
  const double rho = std::exp(-fc.gamma * fc.dt);
  double h_prev = sample_clamped(st, m.states[0].x(), m.states[0].y(), m.states[0].z()).h;
  for (std::size_t k = 1; k < m.states.size(); ++k) {
    const double h_k = sample_clamped(st, m.states[k].x(), m.states[k].y(), m.states[k].z()).h;
    CHECK(h_k >= rho * h_prev - 1e-3 * st.h_max);
    h_prev = h_k;
  }
  // The wall is never crossed by the plan.
  for (const auto& zk : m.states) CHECK(zk.x() < 2.0);
}

TEST_CASE("an infeasible MPC flags itself and falls back") {
  // h falls along every plan faster than the decay allows while the reported
  // gradient is zero, so each linearized row is 0 >= b with b > 0.
  FieldStack st = wall_stack(1.0, 0.0, 0.0);
  for (auto& sl : st.s) {
    sl.gx.array().setConstant(0.0);
    sl.gy.array().setConstant(0.0);
  }
  st.max_grad = 0.0;
  FilterConfig fc;
  TemporalParams tp;
  const MpcResult m = mpc_filter({1.6, 1.0, 0.0}, {0.5, 0.0, 0.0}, st, fc, tp);
  CHECK(m.infeasible);
  CHECK(!m.converged);
  // At the current state the analytical row is slack (0 * u >= -gamma h), so
  // the fallback passes the nominal through.
  CHECK(m.u0.vx == 0.5);
  CHECK(m.u0.vy == 0.0);
}

TEST_CASE("filters leave compliant commands alone across random fields") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uh(0.1, 3.0), ug(0.1, 2.0), uv(0.1, 2.0),
      uu(-0.9, 0.9), ud(-0.5, 0.5);
  FilterConfig fc;
  TemporalParams tp;
  int kept = 0;
  for (int k = 0; k < 200; ++k) {
    const double ang = uu(rng) * M_PI;
    const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
    const FieldStack st =
        uniform_stack(uh(rng), ug(rng) * dir, uv(rng) * dir, ud(rng), ud(rng));
    const ControlCommand u{uu(rng), uu(rng), uu(rng)};
    FilterTelemetry tl;
    const ControlCommand out = analytical_filter({1.5, 1.0, 0.2}, u, st, fc, tp, &tl);
    if (tl.slack >= 0.0) {
      ++kept;
      CHECK(out.vx == u.vx);
      CHECK(out.vy == u.vy);
      CHECK(out.omega == u.omega);
    }
  }
  CHECK(kept > 50);  // the draw actually exercises the inactive branch
}

TEST_CASE("yaw scaling never flips the sign of the yaw correction") {
  FilterConfig fc;
  TemporalParams tp;
  for (double dpsi : {-0.8, -0.2, 0.3, 0.9}) {
    const FieldStack st = uniform_stack(0.05, {-0.6, 0.0}, {-0.4, 0.0}, dpsi, -0.4);
    const ControlCommand u{0.6, 0.0, 0.0};
    const ControlCommand out = analytical_filter({1.5, 1.0, 0.1}, u, st, fc, tp);
    const double corr = out.omega - u.omega;
    if (corr != 0.0) CHECK(corr * dpsi > 0.0);
  }
  // Null case: with dh/dpsi = 0 and dh/dt = 0, eps only reaches the output
  // through the yaw attenuation, which multiplies zero. (With dh/dt != 0 eps
  // legitimately changes sigma and therefore the constraint offset.)
  const FieldStack st = uniform_stack(0.05, {-0.6, 0.0}, {-0.4, 0.0}, 0.0, 0.0);
  TemporalParams tp2 = tp;
  tp2.eps = 3.0;
  const ControlCommand a = analytical_filter({1.5, 1.0, 0.1}, {0.6, 0.0, 0.2}, st, fc, tp);
  const ControlCommand b = analytical_filter({1.5, 1.0, 0.1}, {0.6, 0.0, 0.2}, st, fc, tp2);
  CHECK(a.omega == b.omega);
  CHECK(a.vx == b.vx);
  CHECK(a.vy == b.vy);
}

TEST_CASE("filter output varies smoothly with the state") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  const ControlCommand u{1.0, 0.0, 0.0};
  ControlCommand prev;
  bool first = true;
  for (double x = 1.5; x <= 2.0 + 1e-9; x += 0.005) {
    const ControlCommand out = analytical_filter({x, 1.0, 0.0}, u, st, fc, tp);
    if (!first) {
      CHECK(std::abs(out.vx - prev.vx) < 0.05);
      CHECK(std::abs(out.vy - prev.vy) < 0.05);
    }
    prev = out;
    first = false;
  }
}

TEST_CASE("a state outside the grid is rejected by the MPC") {
  const FieldStack st = wall_stack(1.0, 1.0, 0.0);
  FilterConfig fc;
  TemporalParams tp;
  CHECK_THROWS_AS(mpc_filter({-5.0, 1.0, 0.0}, {0.1, 0.0, 0.0}, st, fc, tp), OutOfBounds);
}
