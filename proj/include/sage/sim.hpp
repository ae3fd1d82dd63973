// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/fields.hpp>
#include <sage/filters.hpp>
#include <sage/occupancy.hpp>
#include <sage/scenario.hpp>
#include <sage/tracker.hpp>

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace sage {

enum RowFlag : unsigned {
  kFlagConstraintActive = 1u << 0,
  kFlagQpFallback = 1u << 1,
  kFlagDegenerate = 1u << 2,
  kFlagMpcStep = 1u << 3,
  kFlagMpcInfeasible = 1u << 4,
  kFlagMpcConverged = 1u << 5,
  kFlagFieldTick = 1u << 6,
};

struct TrajectoryRow {
  double t = 0.0;
  double x = 0.0, y = 0.0, psi = 0.0;
  double h = 0.0, dh_dt = 0.0, sigma = 0.0, slack = 0.0;
  Eigen::Vector3d u_nom{0.0, 0.0, 0.0};
  Eigen::Vector3d u_mpc{0.0, 0.0, 0.0};
  Eigen::Vector3d u_safe{0.0, 0.0, 0.0};
  unsigned flags = 0;
};

struct Metrics {
  double min_h = 0.0;               // +inf when the run never saw an obstacle
  double clearance_human = 0.0;     // min true robot-center distance to agent surfaces
  double clearance_static = 0.0;    // same, to static surfaces (walls included)
  double human_margin = 0.0;        // enclosure scenarios only
  bool human_margin_defined = false;
  std::string pass_side = "None";   // side of the first agent the robot passed on
  bool goal_reached = false;
  long steps = 0;
  bool safety_violation = false;    // min_h fell below -eps_grid
  double eps_grid = 0.0;            // 2 * resolution * max grad over the run
  double h_max = 0.0;               // largest field value seen, for scaling
};

nlohmann::json metrics_to_json(const Metrics& m);

// Worst decay residual min_k (h_{k+1} - rho h_k) re-sampled along one
// converged MPC plan, plus the field scale to judge it against.
struct DtcbfCheck {
  double min_residual = 0.0;
  double h_max = 0.0;
};

struct RunOptions {
  bool collect_dtcbf = false;
  // Called after every field synthesis with the control step index.
  std::function<void(int step, const FieldStack& stack)> on_field;
};

struct RunResult {
  std::vector<TrajectoryRow> log;
  Metrics metrics;
  std::vector<DtcbfCheck> dtcbf;
};

struct WorldState {
  RobotState robot;
  std::vector<Eigen::Vector2d> agent_pos;
  std::vector<double> agent_arc;          // distance walked along the polyline
  std::vector<Eigen::Vector2d> agent_face;
  double t = 0.0;
};

struct SenseResult {
  std::vector<Eigen::Vector2d> points;
  std::vector<LabelObservation> labels;
};

/// Closed-loop scenario runner: synthetic sensing into the occupancy/tracker
/// pipeline, field synthesis, dual-rate filtering, single-integrator world.
/// All randomness comes from one seeded stream.
class Simulator {
 public:
  explicit Simulator(Scenario sc);

  RunResult run(const RunOptions& opts = {});

  // Individual stages, exposed for tests.
  void step_world(const ControlCommand& u, double dt);
  SenseResult sense();
  void field_tick();
  Eigen::Vector3d nominal() const;

  // True-geometry clearance from a point to the nearest static surface
  // (negative inside an obstacle) and to the nearest agent surface.
  double static_clearance(const Eigen::Vector2d& p) const;
  double agent_clearance(const Eigen::Vector2d& p) const;

  const WorldState& world() const { return world_; }
  WorldState& world() { return world_; }
  const Scenario& scenario() const { return sc_; }
  const SemanticGrid& grid() const { return grid_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const FieldStack& stack() const { return stack_; }
  bool have_stack() const { return have_stack_; }
  const std::vector<TrajectoryRow>& partial_log() const { return log_; }

 private:
  Scenario sc_;
  WorldState world_;
  std::mt19937_64 rng_;
  SemanticGrid grid_;
  std::vector<Track> tracks_;
  int next_track_id_ = 0;
  FieldSynthesizer synth_;
  FieldStack stack_;
  bool have_stack_ = false;
  std::vector<RectObstacle> solid_rects_;  // scenario rects plus boundary walls
  std::vector<TrajectoryRow> log_;
};

std::string trajectory_csv_header();
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

/// Signed settled displacement from the enclosure center along `away`:
/// mean robot position over the final fifth of the log. Undefined (flag
/// cleared) when the mean planar speed over that window exceeds settle_speed.
double measure_enclosure_margin(const std::vector<TrajectoryRow>& rows, const Enclosure& enc,
                                bool* defined);

struct SweepPoint {
  double offset = 0.0;
  std::string side = "None";
};

struct SweepResult {
  double max_offset = 0.0;  // largest offset that still passed on the biased side
  std::vector<SweepPoint> points;
};

/// Runs the corridor scenario once per start offset (positive offsets move
/// the start toward the unbiased side) and reports the largest offset whose
/// run still passed on the configured side. No biased pass at all reports
/// min(offsets) - step.
SweepResult sweep_lateral_offset(const Scenario& base, const std::vector<double>& offsets);

/// Ground-truth rasterization of the scenario's static obstacles, walls and
/// agents (agents land as Human-class cells) at occupancy 1. Used for static
/// snapshots where the sensing loop adds nothing.
SemanticGrid rasterize_scenario(const Scenario& sc);

/// Square window of side `window` centered near `center`, corner snapped to
/// the source lattice so cells copy one-to-one. Cells outside the mapped
/// area stay unknown (free). Feeds the field solve when sim.window > 0.
SemanticGrid crop_window(const SemanticGrid& g, const Eigen::Vector2d& center, double window);

}  // namespace sage
