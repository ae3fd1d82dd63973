// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/config.hpp>
#include <sage/error.hpp>

#include <doctest.h>

using namespace sage;
using nlohmann::json;

TEST_CASE("defaults carry the documented values") {
  Params p;
  CHECK(p.occupancy.resolution == 0.05);
  CHECK(p.occupancy.theta_occ == 0.5);
  CHECK(p.occupancy.lambda_decay == 0.9);
  CHECK(p.tracker.gate == 0.8);
  CHECK(p.tracker.alpha == 0.6);
  CHECK(p.tracker.t_lost == 2.0);
  CHECK(p.geometry.n_psi == 16);
  CHECK(p.geometry.pad_human == 0.15);
  CHECK(p.geometry.pad_static == 0.0);
  CHECK(p.geometry.buffer_r == 0.3);
  CHECK(p.geometry.pass_side == "Left");
  CHECK(p.fields.b_human == -1.7);
  CHECK(p.fields.b_objects == -0.5);
  CHECK(p.fields.lambda_tangent == -0.8);
  CHECK(p.fields.c_min == 0.1);
  CHECK(p.fields.sor_omega == 1.8);
  CHECK(p.fields.tol == 1e-6);
  CHECK(p.fields.max_iter == 200000);
  CHECK(p.temporal.beta == 0.3);
  CHECK(p.temporal.eps == 0.5);
  CHECK(p.temporal.kappa == 2.0);
  CHECK(p.filters.gamma == 1.0);
  CHECK(p.filters.horizon == 10);
  CHECK(p.filters.dt == 0.1);
  CHECK(p.sim.control_hz == 100.0);
  CHECK(p.sim.k_field == 10);
  CHECK(p.sim.k_mpc == 5);
}

TEST_CASE("params survive a json round trip") {
  Params p;
  p.fields.b_human = -2.5;
  p.geometry.n_psi = 8;
  p.fields.tangent_classes = {"Human", "StaticObstacle"};
  p.filters.p_u = {2.0, 3.0, 4.0};
  const Params q = params_from_json(params_to_json(p));
  CHECK(q.fields.b_human == -2.5);
  CHECK(q.geometry.n_psi == 8);
  CHECK(q.fields.tangent_classes == std::vector<std::string>{"Human", "StaticObstacle"});
  CHECK(q.filters.p_u == std::array<double, 3>{2.0, 3.0, 4.0});
  CHECK(params_to_json(q) == params_to_json(p));
}

TEST_CASE("merge_params_json patches only the named keys") {
  json base = params_to_json(Params{});
  json patch = {{"fields", {{"b_human", -1.0}}}, {"sim", {{"window", 4.0}}}};
  merge_params_json(base, patch);
  const Params p = params_from_json(base);
  CHECK(p.fields.b_human == -1.0);
  CHECK(p.fields.b_objects == -0.5);  // untouched
  CHECK(p.sim.window == 4.0);
}

TEST_CASE("merge_params_json rejects unknown keys by name") {
  json base = params_to_json(Params{});
  json patch = {{"fields", {{"granularity", 1.0}}}};
  try {
    merge_params_json(base, patch);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("granularity") != std::string::npos);
  }
}

TEST_CASE("apply_override handles numbers, strings, arrays and bad keys") {
  json tree = params_to_json(Params{});

  apply_override(tree, "fields.b_human=-1.0");
  CHECK(tree["fields"]["b_human"] == -1.0);

  apply_override(tree, "geometry.pass_side=Right");
  CHECK(tree["geometry"]["pass_side"] == "Right");

  apply_override(tree, "fields.tangent_classes=Human,StaticObstacle");
  CHECK(tree["fields"]["tangent_classes"] == json({"Human", "StaticObstacle"}));

  try {
    apply_override(tree, "fields.nope=1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("fields.nope") != std::string::npos);
  }

  CHECK_THROWS_AS(apply_override(tree, "fields.b_human"), ConfigError);   // no '='
  CHECK_THROWS_AS(apply_override(tree, "fields.b_human=oops"), ConfigError);
}
