// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/fields.hpp>
#include <sage/occupancy.hpp>

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace sage {

/// Line segments of the `level` iso-contour of `grid`, marching squares over
/// cell centers, world coordinates. Cells where `mask` is 0 are skipped when
/// a mask is given. Saddle cells split by the center average.
std::vector<std::array<Eigen::Vector2d, 2>> contour_segments(const GridF& grid,
                                                             const GridU8* mask, float level);

/// Extra geometry drawn on top of a field plot.
struct PlotOverlay {
  std::vector<Eigen::Vector2d> trajectory;
  bool has_robot = false;
  double robot_x = 0.0, robot_y = 0.0, robot_psi = 0.0;
  double footprint_a = 0.0, footprint_b = 0.0;  // half extents; 0 draws a dot
  std::vector<Eigen::Vector2d> agent_centers;
  std::vector<double> agent_radii;
};

/// One yaw slice of the stack as a standalone SVG document: class-colored
/// cells, h contours, a guidance quiver, then the overlay.
std::string field_svg(const FieldStack& stack, int slice, const PlotOverlay& overlay = {},
                      int px_per_m = 80, int n_contours = 9, int quiver_stride = 6);

}  // namespace sage
