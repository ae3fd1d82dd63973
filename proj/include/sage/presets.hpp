// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/scenario.hpp>

namespace sage {

/// Canonical benchmark scenes. The bench suites and the shipped scenario
/// files are both derived from these builders.

/// Open 6x6 m world, no obstacles: the filters pass commands through.
Scenario preset_empty();

/// Closed 6x6 m room with a disc and a pillar, no agents. Static snapshot
/// for field solves and ego-motion compensation checks.
Scenario preset_room();

/// 8x8 m room split by a block and a standing person, leaving a gap the
/// robot crosses. The full-rate end-to-end budget scene.
Scenario preset_gap();

/// 5x5 m room with a U-shaped enclosure around the robot and a person
/// walking up to the opening. Hold policy: only the filter moves the robot.
Scenario preset_enclosure(long seed);

/// 8x4 m corridor, person walking head-on against the robot's route.
Scenario preset_corridor();

/// 5x5 m room, one block plus a person cutting across the route. Safety
/// regression scene for short full-loop runs.
Scenario preset_safety(long seed);

}  // namespace sage
