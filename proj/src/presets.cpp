// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/presets.hpp>

namespace sage {

Scenario preset_empty() {
  Scenario s;
  s.name = "empty";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {6.0, 6.0};
  s.boundary_walls = false;
  s.start = {1.0, 3.0, 0.0};
  s.goal = {5.0, 3.0};
  s.duration = 10.0;
  return s;
}

Scenario preset_room() {
  Scenario s;
  s.name = "room";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {6.0, 6.0};
  s.rects.push_back({{1.8, 4.1}, {0.35, 0.35}});
  s.discs.push_back({{4.2, 2.4}, 0.55});
  s.start = {1.0, 1.2, 0.0};
  s.goal = {5.2, 5.0};
  s.duration = 16.0;
  s.params.geometry.n_psi = 8;
  s.params.fields.sor_omega = 1.95;
  return s;
}

Scenario preset_gap() {
  Scenario s;
  s.name = "gap";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {8.0, 8.0};
  s.rects.push_back({{4.0, 5.4}, {0.6, 0.8}});
  AgentSpec person;
  person.waypoints = {{4.0, 2.9}};
  person.speed = 0.0;
  person.radius = 0.3;
  s.agents.push_back(person);
  s.start = {1.0, 4.0, 0.0};
  s.goal = {7.0, 4.0};
  s.duration = 20.0;
  s.sensor.noise_std = 0.01;
  s.sensor.label_dropout = 0.05;
  s.params.fields.sor_omega = 1.96;
  return s;
}

Scenario preset_enclosure(long seed) {
  Scenario s;
  s.name = "enclosure";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {5.0, 5.0};
  s.rects.push_back({{1.0, 2.5}, {0.1, 0.9}});   // back of the U
  s.rects.push_back({{1.8, 1.7}, {0.9, 0.1}});   // lower arm
  s.rects.push_back({{1.8, 3.3}, {0.9, 0.1}});   // upper arm
  AgentSpec person;
  person.waypoints = {{4.3, 2.5}, {3.0, 2.5}};
  person.speed = 0.25;
  person.radius = 0.3;
  s.agents.push_back(person);
  s.start = {1.9, 2.5, 0.0};
  s.goal = {1.9, 2.5};
  s.policy = "hold";
  s.duration = 10.0;
  s.seed = seed;
  s.sensor.noise_std = 0.01;
  s.sensor.label_dropout = 0.05;
  s.params.geometry.n_psi = 8;
  s.params.fields.sor_omega = 1.94;
  Enclosure enc;
  enc.center = {1.9, 2.5};
  enc.away = {-1.0, 0.0};
  enc.settle_speed = 0.05;
  s.enclosure = enc;
  return s;
}

Scenario preset_corridor() {
  Scenario s;
  s.name = "corridor";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {8.0, 4.0};
  AgentSpec person;
  person.waypoints = {{6.5, 2.0}, {1.0, 2.0}};
  person.speed = 0.5;
  person.radius = 0.3;
  s.agents.push_back(person);
  s.start = {1.5, 2.0, 0.0};
  s.goal = {6.5, 2.0};
  s.duration = 12.0;
  s.params.geometry.n_psi = 8;
  s.params.fields.sor_omega = 1.96;
  return s;
}

Scenario preset_safety(long seed) {
  Scenario s;
  s.name = "safety";
  s.extent_min = {0.0, 0.0};
  s.extent_max = {5.0, 5.0};
  s.rects.push_back({{2.5, 3.4}, {0.5, 0.3}});
  AgentSpec person;
  person.waypoints = {{3.8, 1.0}, {1.2, 3.8}};
  person.speed = 0.5;
  person.radius = 0.3;
  s.agents.push_back(person);
  s.start = {0.9, 0.9, 0.0};
  s.goal = {4.2, 4.2};
  s.duration = 8.0;
  s.seed = seed;
  s.sensor.noise_std = 0.01;
  s.sensor.label_dropout = 0.05;
  s.params.geometry.n_psi = 8;
  s.params.fields.sor_omega = 1.94;
  return s;
}

}  // namespace sage
