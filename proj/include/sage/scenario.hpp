// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sage {

struct RectObstacle {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d half{0.5, 0.5};  // half extents (m), axis aligned
};

struct DiscObstacle {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.5;
};

/// Scripted pedestrian: walks the waypoint polyline at constant speed and
/// holds position at the final waypoint.
struct AgentSpec {
  std::vector<Eigen::Vector2d> waypoints;
  double speed = 0.0;   // m/s, >= 0
  double radius = 0.3;  // body disc radius (m)
};

struct SensorModel {
  double range = 8.0;         // m
  int rays = 180;             // evenly spread over 2*pi
  double noise_std = 0.0;     // radial Gaussian noise (m)
  double fov_half = 1.0;      // camera cone half angle (rad), labels only
  double label_dropout = 0.0; // probability a visible agent yields no label
};

/// Declared geometry for the enclosure-margin metric: margin is the robot's
/// settled displacement from `center` projected on `away` (unit, pointing
/// away from the human side).
struct Enclosure {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d away{1.0, 0.0};
  double settle_speed = 0.05;  // m/s; faster than this at the end => undefined
};

struct Scenario {
  std::string name = "unnamed";
  Eigen::Vector2d extent_min{0.0, 0.0};
  Eigen::Vector2d extent_max{8.0, 8.0};
  bool boundary_walls = true;
  double wall_thickness = 0.1;  // m, walls sit just inside the extent
  std::vector<RectObstacle> rects;
  std::vector<DiscObstacle> discs;
  std::vector<AgentSpec> agents;
  Eigen::Vector3d start{1.0, 4.0, 0.0};  // x, y, psi
  Eigen::Vector2d goal{7.0, 4.0};
  std::string policy = "goto";  // "goto" | "hold"
  double duration = 20.0;       // s
  std::uint64_t seed = 0;
  SensorModel sensor;
  std::optional<Enclosure> enclosure;
  Params params;
};

/// Parses a scenario JSON document. `schema_version` is mandatory and must
/// equal 1; unknown keys anywhere raise ConfigError naming the key.
Scenario scenario_from_json(const nlohmann::json& j);

/// Loads and parses a scenario file; parse errors surface as ConfigError
/// with the byte offset reported by the JSON parser.
Scenario load_scenario(const std::string& path);

nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace sage
