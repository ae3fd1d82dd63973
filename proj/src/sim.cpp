// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/log.hpp>
#include <sage/sim.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ray_rect(const Eigen::Vector2d& o, const Eigen::Vector2d& d, const RectObstacle& r) {
  double t0 = 0.0, t1 = kInf;
  for (int ax = 0; ax < 2; ++ax) {
    const double lo = r.center[ax] - r.half[ax];
    const double hi = r.center[ax] + r.half[ax];
    if (std::abs(d[ax]) < 1e-15) {
      if (o[ax] < lo || o[ax] > hi) return kInf;
      continue;
    }
    double ta = (lo - o[ax]) / d[ax];
    double tb = (hi - o[ax]) / d[ax];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return (t0 <= t1 && t1 > 0.0) ? t0 : kInf;
}

double ray_disc(const Eigen::Vector2d& o, const Eigen::Vector2d& d, const Eigen::Vector2d& c,
                double radius) {
  const Eigen::Vector2d m = o - c;
  const double b = m.dot(d);
  const double q = m.squaredNorm() - radius * radius;
  const double disc = b * b - q;
  if (disc < 0.0) return kInf;
  const double s = std::sqrt(disc);
  const double t = -b - s;
  if (t > 0.0) return t;
  const double t2 = -b + s;
  return t2 > 0.0 ? t2 : kInf;
}

double rect_clearance(const Eigen::Vector2d& p, const RectObstacle& r) {
  const double dx = std::abs(p.x() - r.center.x()) - r.half.x();
  const double dy = std::abs(p.y() - r.center.y()) - r.half.y();
  if (dx > 0.0 || dy > 0.0)
    return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  return std::max(dx, dy);  // negative: depth inside
}

Eigen::Vector2d polyline_at(const std::vector<Eigen::Vector2d>& wps, double arc,
                            Eigen::Vector2d* face) {
  if (wps.size() == 1) return wps[0];
  double left = arc;
  for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
    const Eigen::Vector2d seg = wps[i + 1] - wps[i];
    const double len = seg.norm();
    if (len < 1e-12) continue;
    if (left <= len) {
      if (face) *face = seg / len;
      return wps[i] + (left / len) * seg;
    }
    left -= len;
    if (face) *face = seg / len;
  }
  return wps.back();
}

double polyline_length(const std::vector<Eigen::Vector2d>& wps) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < wps.size(); ++i) total += (wps[i + 1] - wps[i]).norm();
  return total;
}

}  // namespace

Simulator::Simulator(Scenario sc)
    : sc_(std::move(sc)),
      rng_(sc_.seed),
      grid_(sc_.extent_min, sc_.params.occupancy.resolution,
            std::max(1, static_cast<int>(std::ceil(
                            (sc_.extent_max.x() - sc_.extent_min.x()) /
                                sc_.params.occupancy.resolution -
                            1e-9))),
            std::max(1, static_cast<int>(std::ceil(
                            (sc_.extent_max.y() - sc_.extent_min.y()) /
                                sc_.params.occupancy.resolution -
                            1e-9)))),
      synth_(sc_.params) {
  world_.robot = RobotState{sc_.start.x(), sc_.start.y(), wrap_angle(sc_.start.z())};
  for (const auto& a : sc_.agents) {
    world_.agent_pos.push_back(a.waypoints.front());
    world_.agent_arc.push_back(0.0);
    Eigen::Vector2d face(1.0, 0.0);
    if (a.speed > 0.0 && polyline_length(a.waypoints) > 1e-12) {
      for (std::size_t i = 0; i + 1 < a.waypoints.size(); ++i) {
        const Eigen::Vector2d seg = a.waypoints[i + 1] - a.waypoints[i];
        if (seg.norm() > 1e-12) {
          face = seg.normalized();
          break;
        }
      }
    } else {
      const Eigen::Vector2d to_robot =
          Eigen::Vector2d(sc_.start.x(), sc_.start.y()) - a.waypoints.front();
      if (to_robot.norm() > 1e-12) face = to_robot.normalized();
    }
    world_.agent_face.push_back(face);
  }

  solid_rects_ = sc_.rects;
  if (sc_.boundary_walls) {
    const Eigen::Vector2d lo = sc_.extent_min, hi = sc_.extent_max;
    const double wt = sc_.wall_thickness;
    const Eigen::Vector2d c = 0.5 * (lo + hi);
    const double hw = 0.5 * (hi.x() - lo.x()), hh = 0.5 * (hi.y() - lo.y());
    solid_rects_.push_back({{c.x(), lo.y() + wt / 2}, {hw, wt / 2}});
    solid_rects_.push_back({{c.x(), hi.y() - wt / 2}, {hw, wt / 2}});
    solid_rects_.push_back({{lo.x() + wt / 2, c.y()}, {wt / 2, hh}});
    solid_rects_.push_back({{hi.x() - wt / 2, c.y()}, {wt / 2, hh}});
  }
}

void Simulator::step_world(const ControlCommand& u, double dt) {
  if (dt <= 0.0) throw ConfigError("step_world: dt must be > 0");
  world_.robot.x += dt * u.vx;
  world_.robot.y += dt * u.vy;
  world_.robot.psi = wrap_angle(world_.robot.psi + dt * u.omega);
  for (std::size_t i = 0; i < sc_.agents.size(); ++i) {
    const AgentSpec& a = sc_.agents[i];
    if (a.speed <= 0.0) continue;
    world_.agent_arc[i] =
        std::min(world_.agent_arc[i] + a.speed * dt, polyline_length(a.waypoints));
    Eigen::Vector2d face = world_.agent_face[i];
    world_.agent_pos[i] = polyline_at(a.waypoints, world_.agent_arc[i], &face);
    world_.agent_face[i] = face;
  }
  world_.t += dt;
}

SenseResult Simulator::sense() {
  SenseResult out;
  const Eigen::Vector2d o(world_.robot.x, world_.robot.y);
  const SensorModel& sm = sc_.sensor;
  std::normal_distribution<double> noise(0.0, sm.noise_std > 0.0 ? sm.noise_std : 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int k = 0; k < sm.rays; ++k) {
    const double th = world_.robot.psi + 2.0 * M_PI * k / sm.rays;
    const Eigen::Vector2d d(std::cos(th), std::sin(th));
    double t = kInf;
    for (const auto& r : solid_rects_) t = std::min(t, ray_rect(o, d, r));
    for (const auto& dc : sc_.discs) t = std::min(t, ray_disc(o, d, dc.center, dc.radius));
    for (std::size_t i = 0; i < world_.agent_pos.size(); ++i)
      t = std::min(t, ray_disc(o, d, world_.agent_pos[i], sc_.agents[i].radius));
    if (t <= sm.range) {
      if (sm.noise_std > 0.0) t = std::max(0.0, t + noise(rng_));
      out.points.push_back(o + t * d);
    }
  }

  for (std::size_t i = 0; i < world_.agent_pos.size(); ++i) {
    const double u = unif(rng_);
    Eigen::Vector2d jitter(0.0, 0.0);
    if (sm.noise_std > 0.0) jitter = Eigen::Vector2d(noise(rng_), noise(rng_));
    const Eigen::Vector2d rel = world_.agent_pos[i] - o;
    const double dist = rel.norm();
    if (dist > sm.range) continue;
    const double bearing = std::atan2(rel.y(), rel.x());
    if (std::abs(wrap_angle(bearing - world_.robot.psi)) > sm.fov_half) continue;
    if (u < sm.label_dropout) continue;
    out.labels.push_back(LabelObservation{world_.agent_pos[i] + jitter});
  }
  return out;
}

void Simulator::field_tick() {
  SenseResult sr = sense();
  const OccupancyParams& oc = sc_.params.occupancy;
  RobotMask mask{{world_.robot.x, world_.robot.y}, oc.mask_a, oc.mask_b, oc.mask_p,
                 world_.robot.psi};
  integrate_points(grid_, sr.points, mask, oc.lambda_decay, oc.sigma_deposit);
  mask_robot(grid_, mask);
  grid_.stamp = world_.t;

  const GridU8 occ = threshold_occupied(grid_, oc.theta_occ);
  const auto clusters = extract_clusters(occ);
  const auto pairs = associate(tracks_, clusters, sc_.params.tracker.gate, world_.t);
  tracks_ = update_tracks(std::move(tracks_), pairs, clusters, sr.labels, world_.t,
                          sc_.params.tracker, next_track_id_);
  label_cells(grid_, occ, tracks_, sc_.params.tracker.label_radius);

  if (sc_.params.sim.window > 0.0) {
    const SemanticGrid sub =
        crop_window(grid_, {world_.robot.x, world_.robot.y}, sc_.params.sim.window);
    stack_ = synth_.synthesize(sub, world_.t);
  } else {
    stack_ = synth_.synthesize(grid_, world_.t);
  }
  have_stack_ = true;
}

Eigen::Vector3d Simulator::nominal() const {
  if (sc_.policy == "hold") return Eigen::Vector3d::Zero();
  const SimParams& sp = sc_.params.sim;
  const FilterConfig& fc = sc_.params.filters;
  const Eigen::Vector2d q(world_.robot.x, world_.robot.y);
  const Eigen::Vector2d to = sc_.goal - q;
  if (to.norm() <= sp.goal_tol) return Eigen::Vector3d::Zero();
  Eigen::Vector2d v = sp.policy_gain * to;
  v.x() = std::clamp(v.x(), fc.v_min, fc.v_max);
  v.y() = std::clamp(v.y(), fc.v_min, fc.v_max);
  const double des = std::atan2(to.y(), to.x());
  const double w =
      std::clamp(sp.policy_yaw_gain * wrap_angle(des - world_.robot.psi), fc.w_min, fc.w_max);
  return {v.x(), v.y(), w};
}

double Simulator::static_clearance(const Eigen::Vector2d& p) const {
  double best = kInf;
  for (const auto& r : solid_rects_) best = std::min(best, rect_clearance(p, r));
  for (const auto& d : sc_.discs) best = std::min(best, (p - d.center).norm() - d.radius);
  return best;
}

double Simulator::agent_clearance(const Eigen::Vector2d& p) const {
  double best = kInf;
  for (std::size_t i = 0; i < world_.agent_pos.size(); ++i)
    best = std::min(best, (p - world_.agent_pos[i]).norm() - sc_.agents[i].radius);
  return best;
}

RunResult Simulator::run(const RunOptions& opts) {
  RunResult res;
  const SimParams& sp = sc_.params.sim;
  const FilterConfig& fc = sc_.params.filters;
  const TemporalParams& tp = sc_.params.temporal;
  const double dt = 1.0 / sp.control_hz;
  const int total = std::max(1, static_cast<int>(std::llround(sc_.duration * sp.control_hz)));
  const double rho = std::exp(-fc.gamma * fc.dt);

  log_.clear();
  log_.reserve(static_cast<std::size_t>(total));
  Metrics& m = res.metrics;
  m.min_h = kInf;
  m.clearance_human = kInf;
  m.clearance_static = kInf;

  ControlCommand u_mpc{};
  double max_grad_seen = 0.0;

  // Pass-side bookkeeping against the first agent.
  bool crossed = false;
  double prev_s = 0.0;
  bool have_prev_s = false;

  for (int i = 0; i < total; ++i) {
    unsigned flags = 0;
    if (i % sp.k_field == 0) {
      field_tick();
      flags |= kFlagFieldTick;
      if (opts.on_field) opts.on_field(i, stack_);
    }
    const Eigen::Vector3d un = nominal();

    if (i % sp.k_mpc == 0) {
      const MpcResult mpc = mpc_filter(world_.robot, ControlCommand::fromVec(un), stack_, fc, tp);
      u_mpc = mpc.u0;
      flags |= kFlagMpcStep;
      if (mpc.infeasible) flags |= kFlagMpcInfeasible;
      if (mpc.converged) flags |= kFlagMpcConverged;
      if (opts.collect_dtcbf && mpc.converged && !stack_.open) {
        DtcbfCheck chk;
        chk.h_max = stack_.h_max;
        chk.min_residual = kInf;
        double h_prev = sample_clamped(stack_, mpc.states[0].x(), mpc.states[0].y(),
                                       mpc.states[0].z())
                            .h;
        for (std::size_t k = 1; k < mpc.states.size(); ++k) {
          const double h_k =
              sample_clamped(stack_, mpc.states[k].x(), mpc.states[k].y(), mpc.states[k].z()).h;
          chk.min_residual = std::min(chk.min_residual, h_k - rho * h_prev);
          h_prev = h_k;
        }
        res.dtcbf.push_back(chk);
      }
    }

    FilterTelemetry tl;
    const ControlCommand u_safe = analytical_filter(world_.robot, u_mpc, stack_, fc, tp, &tl);
    if (tl.constraint_active) flags |= kFlagConstraintActive;
    if (tl.qp_fallback) flags |= kFlagQpFallback;
    if (tl.degenerate) flags |= kFlagDegenerate;

    TrajectoryRow row;
    row.t = world_.t;
    row.x = world_.robot.x;
    row.y = world_.robot.y;
    row.psi = world_.robot.psi;
    row.h = tl.h;
    row.dh_dt = tl.dh_dt;
    row.sigma = tl.sigma;
    row.slack = tl.slack;
    row.u_nom = un;
    row.u_mpc = u_mpc.vec();
    row.u_safe = u_safe.vec();
    row.flags = flags;
    log_.push_back(row);

    const Eigen::Vector2d q(world_.robot.x, world_.robot.y);
    m.min_h = std::min(m.min_h, tl.h);
    m.clearance_static = std::min(m.clearance_static, static_clearance(q));
    if (!world_.agent_pos.empty())
      m.clearance_human = std::min(m.clearance_human, agent_clearance(q));
    m.h_max = std::max(m.h_max, stack_.h_max);
    max_grad_seen = std::max(max_grad_seen, stack_.max_grad);

    if (!world_.agent_pos.empty() && !crossed) {
      const Eigen::Vector2d f = world_.agent_face[0];
      const Eigen::Vector2d r = q - world_.agent_pos[0];
      const double s = r.dot(f);
      if (have_prev_s && prev_s > 0.0 && s <= 0.0) {
        const double c = f.x() * r.y() - f.y() * r.x();
        m.pass_side = c > 1e-9 ? "Left" : (c < -1e-9 ? "Right" : "None");
        crossed = true;
      }
      prev_s = s;
      have_prev_s = true;
    }

    step_world(u_safe, dt);

    if (sc_.policy == "goto" &&
        (Eigen::Vector2d(world_.robot.x, world_.robot.y) - sc_.goal).norm() <= sp.goal_tol) {
      m.goal_reached = true;
      break;
    }
  }

  m.steps = static_cast<long>(log_.size());
  m.eps_grid = 2.0 * sc_.params.occupancy.resolution * max_grad_seen;
  m.safety_violation = std::isfinite(m.min_h) && m.min_h < -m.eps_grid;
  if (sc_.enclosure) {
    bool defined = false;
    m.human_margin = measure_enclosure_margin(log_, *sc_.enclosure, &defined);
    m.human_margin_defined = defined;
  }
  res.log = log_;
  return res;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["min_h"] = std::isfinite(m.min_h) ? nlohmann::json(m.min_h) : nlohmann::json(nullptr);
  j["clearance_human"] = std::isfinite(m.clearance_human) ? nlohmann::json(m.clearance_human)
                                                          : nlohmann::json(nullptr);
  j["clearance_static"] = std::isfinite(m.clearance_static) ? nlohmann::json(m.clearance_static)
                                                            : nlohmann::json(nullptr);
  j["human_margin"] =
      m.human_margin_defined ? nlohmann::json(m.human_margin) : nlohmann::json(nullptr);
  j["human_margin_defined"] = m.human_margin_defined;
  j["pass_side"] = m.pass_side;
  j["goal_reached"] = m.goal_reached;
  j["steps"] = m.steps;
  j["safety_violation"] = m.safety_violation;
  j["eps_grid"] = m.eps_grid;
  j["h_max"] = m.h_max;
  return j;
}

std::string trajectory_csv_header() {
  return "t,x,y,psi,h,dh_dt,sigma,slack,unom_vx,unom_vy,unom_w,umpc_vx,umpc_vy,umpc_w,"
         "usafe_vx,usafe_vy,usafe_w,flags\n";
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = trajectory_csv_header();
  char buf[640];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%u\n",
                  r.t, r.x, r.y, r.psi, r.h, r.dh_dt, r.sigma, r.slack, r.u_nom.x(),
                  r.u_nom.y(), r.u_nom.z(), r.u_mpc.x(), r.u_mpc.y(), r.u_mpc.z(),
                  r.u_safe.x(), r.u_safe.y(), r.u_safe.z(), r.flags);
    out += buf;
  }
  return out;
}

double measure_enclosure_margin(const std::vector<TrajectoryRow>& rows, const Enclosure& enc,
                                bool* defined) {
  if (defined) *defined = false;
  if (rows.empty()) return 0.0;
  const std::size_t n = rows.size();
  const std::size_t window = std::max<std::size_t>(1, n / 5);
  Eigen::Vector2d mean(0.0, 0.0);
  double speed = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    mean += Eigen::Vector2d(rows[i].x, rows[i].y);
    speed += std::hypot(rows[i].u_safe.x(), rows[i].u_safe.y());
  }
  mean /= static_cast<double>(window);
  speed /= static_cast<double>(window);
  if (speed > enc.settle_speed) {
    log::warn("enclosure margin undefined: mean terminal speed %.3f m/s", speed);
    return 0.0;
  }
  if (defined) *defined = true;
  return (mean - enc.center).dot(enc.away);
}

SweepResult sweep_lateral_offset(const Scenario& base, const std::vector<double>& offsets) {
  SweepResult res;
  if (offsets.empty()) return res;
  const Eigen::Vector2d start_xy(base.start.x(), base.start.y());
  Eigen::Vector2d axis = base.goal - start_xy;
  if (axis.norm() < 1e-9) throw ConfigError("sweep: goal coincides with start");
  axis.normalize();
  const Eigen::Vector2d left(-axis.y(), axis.x());
  const bool bias_left = base.params.geometry.pass_side == "Left";
  const Eigen::Vector2d unbias = bias_left ? left : Eigen::Vector2d(-left);

  const double step = offsets.size() >= 2 ? std::abs(offsets[1] - offsets[0]) : 0.1;
  double best = -kInf;
  for (double o : offsets) {
    Scenario sc = base;
    sc.start.x() += o * unbias.x();
    sc.start.y() += o * unbias.y();
    Simulator sim(sc);
    const RunResult rr = sim.run();
    res.points.push_back({o, rr.metrics.pass_side});
    if (rr.metrics.pass_side == base.params.geometry.pass_side) best = std::max(best, o);
  }
  res.max_offset =
      std::isfinite(best) ? best : *std::min_element(offsets.begin(), offsets.end()) - step;
  return res;
}

SemanticGrid rasterize_scenario(const Scenario& sc) {
  const double res = sc.params.occupancy.resolution;
  const int w = std::max(
      1, static_cast<int>(std::ceil((sc.extent_max.x() - sc.extent_min.x()) / res - 1e-9)));
  const int h = std::max(
      1, static_cast<int>(std::ceil((sc.extent_max.y() - sc.extent_min.y()) / res - 1e-9)));
  SemanticGrid g(sc.extent_min, res, w, h);

  std::vector<RectObstacle> rects = sc.rects;
  if (sc.boundary_walls) {
    const Eigen::Vector2d lo = sc.extent_min, hi = sc.extent_max;
    const double wt = sc.wall_thickness;
    const Eigen::Vector2d c = 0.5 * (lo + hi);
    const double hw = 0.5 * (hi.x() - lo.x()), hh = 0.5 * (hi.y() - lo.y());
    rects.push_back({{c.x(), lo.y() + wt / 2}, {hw, wt / 2}});
    rects.push_back({{c.x(), hi.y() - wt / 2}, {hw, wt / 2}});
    rects.push_back({{lo.x() + wt / 2, c.y()}, {wt / 2, hh}});
    rects.push_back({{hi.x() - wt / 2, c.y()}, {wt / 2, hh}});
  }

  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const Eigen::Vector2d p = g.occupancy.cellCenter(ix, iy);
      bool solid = false;
      bool human = false;
      for (const auto& r : rects)
        if (rect_clearance(p, r) <= 0.0) {
          solid = true;
          break;
        }
      if (!solid)
        for (const auto& d : sc.discs)
          if ((p - d.center).norm() <= d.radius) {
            solid = true;
            break;
          }
      if (!solid)
        for (const auto& a : sc.agents)
          if ((p - a.waypoints.front()).norm() <= a.radius) {
            solid = true;
            human = true;
            break;
          }
      if (solid) {
        g.occupancy(ix, iy) = 1.0f;
        g.cell_class(ix, iy) = static_cast<std::uint8_t>(human ? CellClass::Human
                                                               : CellClass::StaticObstacle);
      }
    }
  return g;
}

SemanticGrid crop_window(const SemanticGrid& g, const Eigen::Vector2d& center, double window) {
  const double res = g.occupancy.resolution();
  const int n = std::max(1, static_cast<int>(std::llround(window / res)));
  // Snap the corner onto the source lattice so cells copy index-to-index.
  const Eigen::Vector2d want = center.array() - window / 2.0;
  const Eigen::Vector2d rel = (want - g.occupancy.origin()) / res;
  const int ox = static_cast<int>(std::floor(rel.x() + 0.5));
  const int oy = static_cast<int>(std::floor(rel.y() + 0.5));
  const Eigen::Vector2d origin = g.occupancy.origin() + res * Eigen::Vector2d(ox, oy);

  SemanticGrid out(origin, res, n, n);
  out.stamp = g.stamp;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int sx = ox + ix, sy = oy + iy;
      if (sx < 0 || sy < 0 || sx >= g.occupancy.width() || sy >= g.occupancy.height())
        continue;  // beyond the mapped area: unknown, treated as free
      out.occupancy(ix, iy) = g.occupancy(sx, sy);
      out.cell_class(ix, iy) = g.cell_class(sx, sy);
    }
  return out;
}

}  // namespace sage
