// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/scenario.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace sage {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown scenario key: " + where + key);
  }
}

Eigen::Vector2d vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + " must be a [x, y] number pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::Vector3d vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(where + " must be a [x, y, psi] number triple");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_inside(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, const Scenario& s,
                  const std::string& what) {
  const double tol = 1e-9;
  if (lo.x() < s.extent_min.x() - tol || lo.y() < s.extent_min.y() - tol ||
      hi.x() > s.extent_max.x() + tol || hi.y() > s.extent_max.y() + tol)
    throw ConfigError(what + " lies outside the world extent");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario document must be a JSON object");
  check_keys(j,
             {"schema_version", "name", "extent", "boundary_walls", "wall_thickness", "rects",
              "discs", "agents", "start", "goal", "policy", "duration", "seed", "sensor",
              "enclosure", "params"},
             "");
  if (!j.contains("schema_version"))
    throw ConfigError("scenario is missing the mandatory schema_version field");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != 1)
    throw ConfigError("unsupported scenario schema_version (expected 1)");

  Scenario s;
  s.name = j.value("name", s.name);
  if (j.contains("extent")) {
    const json& e = j["extent"];
    check_keys(e, {"min", "max"}, "extent.");
    if (e.contains("min")) s.extent_min = vec2(e["min"], "extent.min");
    if (e.contains("max")) s.extent_max = vec2(e["max"], "extent.max");
  }
  if (s.extent_max.x() <= s.extent_min.x() || s.extent_max.y() <= s.extent_min.y())
    throw ConfigError("extent.max must exceed extent.min on both axes");

  s.boundary_walls = j.value("boundary_walls", s.boundary_walls);
  s.wall_thickness = j.value("wall_thickness", s.wall_thickness);
  if (s.wall_thickness <= 0.0) throw ConfigError("wall_thickness must be > 0");

  if (j.contains("rects")) {
    for (std::size_t i = 0; i < j["rects"].size(); ++i) {
      const json& r = j["rects"][i];
      const std::string where = "rects[" + std::to_string(i) + "].";
      check_keys(r, {"center", "half"}, where);
      RectObstacle ro;
      ro.center = vec2(r.at("center"), where + "center");
      ro.half = vec2(r.at("half"), where + "half");
      if (ro.half.x() <= 0.0 || ro.half.y() <= 0.0)
        throw ConfigError(where + "half extents must be > 0");
      check_inside(ro.center - ro.half, ro.center + ro.half, s, where + "rect");
      s.rects.push_back(ro);
    }
  }
  if (j.contains("discs")) {
    for (std::size_t i = 0; i < j["discs"].size(); ++i) {
      const json& d = j["discs"][i];
      const std::string where = "discs[" + std::to_string(i) + "].";
      check_keys(d, {"center", "radius"}, where);
      DiscObstacle di;
      di.center = vec2(d.at("center"), where + "center");
      di.radius = d.at("radius").get<double>();
      if (di.radius <= 0.0) throw ConfigError(where + "radius must be > 0");
      check_inside((di.center.array() - di.radius).matrix(),
                   (di.center.array() + di.radius).matrix(), s, where + "disc");
      s.discs.push_back(di);
    }
  }
  if (j.contains("agents")) {
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
      const json& a = j["agents"][i];
      const std::string where = "agents[" + std::to_string(i) + "].";
      check_keys(a, {"waypoints", "speed", "radius"}, where);
      AgentSpec ag;
      if (!a.contains("waypoints") || !a["waypoints"].is_array() || a["waypoints"].empty())
        throw ConfigError(where + "waypoints must be a non-empty array of points");
      for (std::size_t w = 0; w < a["waypoints"].size(); ++w)
        ag.waypoints.push_back(
            vec2(a["waypoints"][w], where + "waypoints[" + std::to_string(w) + "]"));
      ag.speed = a.value("speed", ag.speed);
      ag.radius = a.value("radius", ag.radius);
      if (ag.speed < 0.0) throw ConfigError(where + "speed must be >= 0");
      if (ag.radius <= 0.0) throw ConfigError(where + "radius must be > 0");
      for (const auto& w : ag.waypoints)
        check_inside((w.array() - ag.radius).matrix(), (w.array() + ag.radius).matrix(), s,
                     where + "waypoint");
      s.agents.push_back(ag);
    }
  }

  if (j.contains("start")) s.start = vec3(j["start"], "start");
  if (j.contains("goal")) s.goal = vec2(j["goal"], "goal");
  s.policy = j.value("policy", s.policy);
  if (s.policy != "goto" && s.policy != "hold")
    throw ConfigError("policy must be \"goto\" or \"hold\"");
  s.duration = j.value("duration", s.duration);
  if (s.duration <= 0.0) throw ConfigError("duration must be > 0");
  s.seed = j.value("seed", s.seed);

  if (j.contains("sensor")) {
    const json& se = j["sensor"];
    check_keys(se, {"range", "rays", "noise_std", "fov_half", "label_dropout"}, "sensor.");
    s.sensor.range = se.value("range", s.sensor.range);
    s.sensor.rays = se.value("rays", s.sensor.rays);
    s.sensor.noise_std = se.value("noise_std", s.sensor.noise_std);
    s.sensor.fov_half = se.value("fov_half", s.sensor.fov_half);
    s.sensor.label_dropout = se.value("label_dropout", s.sensor.label_dropout);
  }
  if (s.sensor.range <= 0.0) throw ConfigError("sensor.range must be > 0");
  if (s.sensor.rays < 1) throw ConfigError("sensor.rays must be >= 1");
  if (s.sensor.noise_std < 0.0) throw ConfigError("sensor.noise_std must be >= 0");
  if (s.sensor.fov_half <= 0.0 || s.sensor.fov_half > M_PI + 1e-12)
    throw ConfigError("sensor.fov_half must lie in (0, pi]");
  if (s.sensor.label_dropout < 0.0 || s.sensor.label_dropout > 1.0)
    throw ConfigError("sensor.label_dropout must lie in [0, 1]");

  if (j.contains("enclosure") && !j["enclosure"].is_null()) {
    const json& e = j["enclosure"];
    check_keys(e, {"center", "away", "settle_speed"}, "enclosure.");
    Enclosure enc;
    enc.center = vec2(e.at("center"), "enclosure.center");
    enc.away = vec2(e.at("away"), "enclosure.away");
    enc.settle_speed = e.value("settle_speed", enc.settle_speed);
    const double n = enc.away.norm();
    if (n < 1e-12) throw ConfigError("enclosure.away must be a nonzero direction");
    enc.away /= n;
    if (enc.settle_speed <= 0.0) throw ConfigError("enclosure.settle_speed must be > 0");
    s.enclosure = enc;
  }

  json base = params_to_json(Params{});
  if (j.contains("params")) merge_params_json(base, j["params"]);
  s.params = params_from_json(base);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario JSON parse error in " + path + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["name"] = s.name;
  j["extent"] = {{"min", {s.extent_min.x(), s.extent_min.y()}},
                 {"max", {s.extent_max.x(), s.extent_max.y()}}};
  j["boundary_walls"] = s.boundary_walls;
  j["wall_thickness"] = s.wall_thickness;
  j["rects"] = json::array();
  for (const auto& r : s.rects)
    j["rects"].push_back({{"center", {r.center.x(), r.center.y()}},
                          {"half", {r.half.x(), r.half.y()}}});
  j["discs"] = json::array();
  for (const auto& d : s.discs)
    j["discs"].push_back({{"center", {d.center.x(), d.center.y()}}, {"radius", d.radius}});
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    json w = json::array();
    for (const auto& p : a.waypoints) w.push_back({p.x(), p.y()});
    j["agents"].push_back({{"waypoints", w}, {"speed", a.speed}, {"radius", a.radius}});
  }
  j["start"] = {s.start.x(), s.start.y(), s.start.z()};
  j["goal"] = {s.goal.x(), s.goal.y()};
  j["policy"] = s.policy;
  j["duration"] = s.duration;
  j["seed"] = s.seed;
  j["sensor"] = {{"range", s.sensor.range},
                 {"rays", s.sensor.rays},
                 {"noise_std", s.sensor.noise_std},
                 {"fov_half", s.sensor.fov_half},
                 {"label_dropout", s.sensor.label_dropout}};
  if (s.enclosure)
    j["enclosure"] = {{"center", {s.enclosure->center.x(), s.enclosure->center.y()}},
                      {"away", {s.enclosure->away.x(), s.enclosure->away.y()}},
                      {"settle_speed", s.enclosure->settle_speed}};
  j["params"] = params_to_json(s.params);
  return j;
}

}  // namespace sage
