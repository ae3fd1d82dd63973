// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/config.hpp>
#include <sage/error.hpp>

#include <sstream>

namespace sage {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OccupancyParams, resolution, theta_occ,
                                                lambda_decay, sigma_deposit, mask_a, mask_b,
                                                mask_p)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrackerParams, gate, alpha, t_lost, label_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GeometryParams, n_psi, footprint_a, footprint_b,
                                                pad_human, pad_static, buffer_r, sigma_normal,
                                                pass_side)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FieldParams, b_human, b_objects, lambda_tangent,
                                                tangent_classes, forcing_scale, c_min,
                                                sigma_forcing, sor_omega, tol, max_iter)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TemporalParams, beta, eps, kappa)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FilterConfig, gamma, horizon, dt, p_u, v_min,
                                                v_max, w_min, w_max, sqp_max_iters, ls_shrink,
                                                tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimParams, control_hz, k_field, k_mpc, window,
                                                goal_tol, policy_gain, policy_yaw_gain)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Params, occupancy, tracker, geometry, fields,
                                                temporal, filters, sim)

json params_to_json(const Params& p) { return json(p); }

Params params_from_json(const json& j) { return j.get<Params>(); }

namespace {

void check_keys(const json& patch, const json& schema, const std::string& prefix) {
  if (!patch.is_object()) return;
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!schema.is_object() || !schema.contains(key))
      throw ConfigError("unknown parameter key: " + path);
    if (value.is_object()) check_keys(value, schema.at(key), path);
  }
}

}  // namespace

void merge_params_json(json& base, const json& patch) {
  check_keys(patch, params_to_json(Params{}), "");
  base.merge_patch(patch);
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be KEY=VALUE, got: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  // walk the dotted path
  json* node = &tree;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw ConfigError("unknown override key: " + key);
    node = &(*node)[parts[i]];
  }
  const std::string& leaf = parts.back();
  if (!node->is_object() || !node->contains(leaf))
    throw ConfigError("unknown override key: " + key);

  json& target = (*node)[leaf];
  try {
    if (target.is_number() || target.is_boolean()) {
      target = json::parse(value);
    } else if (target.is_string()) {
      target = value;
    } else if (target.is_array()) {
      // comma-separated list; numbers parse as numbers, rest as strings
      json arr = json::array();
      std::stringstream vs(value);
      std::string item;
      while (std::getline(vs, item, ',')) {
        if (item.empty()) continue;
        try {
          arr.push_back(json::parse(item));
        } catch (const json::exception&) {
          arr.push_back(item);
        }
      }
      target = arr;
    } else {
      throw ConfigError("override key is not a settable value: " + key);
    }
  } catch (const json::exception&) {
    throw ConfigError("cannot parse override value for " + key + ": " + value);
  }
}

}  // namespace sage
