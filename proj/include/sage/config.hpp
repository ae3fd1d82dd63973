// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace sage {

struct OccupancyParams {
  double resolution = 0.05;    // m/cell
  double theta_occ = 0.5;      // occupancy threshold (closed)
  double lambda_decay = 0.9;   // per grid-update tick
  double sigma_deposit = 0.05; // Gaussian deposit std (m)
  double mask_a = 0.45;        // robot self-mask semi-axes (m) and exponent
  double mask_b = 0.30;
  double mask_p = 4.0;
};

struct TrackerParams {
  double gate = 0.8;          // association gate (m)
  double alpha = 0.6;         // smoothing weight
  double t_lost = 2.0;        // prune timeout (s)
  double label_radius = 0.5;  // human label transfer radius (m)
};

struct GeometryParams {
  int n_psi = 16;              // yaw slices
  double footprint_a = 0.30;   // footprint half-extents (m)
  double footprint_b = 0.20;
  double pad_human = 0.15;     // class-aware extra inflation (m)
  double pad_static = 0.0;
  double buffer_r = 0.3;       // tangential interface offset (m)
  double sigma_normal = 0.1;   // boundary-frame smoothing (m)
  std::string pass_side = "Left";
};

struct FieldParams {
  double b_human = -1.7;
  double b_objects = -0.5;
  double lambda_tangent = -0.8;
  std::vector<std::string> tangent_classes = {"Human"};
  double forcing_scale = 1.0;  // s in f = smooth(min(s*div, -c_min))
  double c_min = 0.1;
  double sigma_forcing = 0.1;  // m
  double sor_omega = 1.8;
  double tol = 1e-6;           // estimated-error convergence criterion
  int max_iter = 200000;
};

struct TemporalParams {
  double beta = 0.3;  // low-pass coefficient
  double eps = 0.5;   // open-space attenuation
  double kappa = 2.0;
};

struct FilterConfig {
  double gamma = 1.0;  // 1/s
  int horizon = 10;
  double dt = 0.1;  // s, MPC step
  std::array<double, 3> p_u = {1.0, 1.0, 1.0};  // diagonal input cost
  double v_min = -1.0, v_max = 1.0;             // m/s, per world axis
  double w_min = -1.5, w_max = 1.5;             // rad/s
  int sqp_max_iters = 10;
  double ls_shrink = 0.5;
  double tol = 1e-4;
};

struct SimParams {
  double control_hz = 100.0;
  int k_field = 10;        // field synthesis every K_f control steps
  int k_mpc = 5;           // MPC every K_m control steps
  double window = 0.0;     // field solve crop window (m); 0 = whole grid
  double goal_tol = 0.3;   // m
  double policy_gain = 1.0;
  double policy_yaw_gain = 1.5;
};

struct Params {
  OccupancyParams occupancy;
  TrackerParams tracker;
  GeometryParams geometry;
  FieldParams fields;
  TemporalParams temporal;
  FilterConfig filters;
  SimParams sim;
};

nlohmann::json params_to_json(const Params& p);
Params params_from_json(const nlohmann::json& j);

/// Validates that every key in `patch` exists in the default parameter tree,
/// then merges it over `base`. Throws ConfigError naming the first bad key.
void merge_params_json(nlohmann::json& base, const nlohmann::json& patch);

/// Applies one dotted-key override ("fields.b_human=-1.7") onto a params JSON
/// tree. The key must exist; the value string is coerced to the target type.
void apply_override(nlohmann::json& tree, const std::string& assignment);

}  // namespace sage
