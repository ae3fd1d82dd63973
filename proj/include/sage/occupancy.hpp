// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/grid.hpp>
#include <sage/tracker.hpp>

#include <vector>

namespace sage {

// Hyper-elliptical robot self-occlusion mask: |x'/a|^p + |y'/b|^p <= 1 in body frame.
struct RobotMask {
  Eigen::Vector2d center{0.0, 0.0};
  double a = 0.45;
  double b = 0.30;
  double p = 4.0;
  double yaw = 0.0;

  bool contains(const Eigen::Vector2d& q) const;
};

// Occupancy evidence in [0,1] plus a per-cell semantic class.
struct SemanticGrid {
  GridF occupancy;
  GridU8 cell_class;  // CellClass values
  double stamp = 0.0;

  SemanticGrid(const Eigen::Vector2d& origin, double resolution, int width, int height)
      : occupancy(origin, resolution, width, height),
        cell_class(origin, resolution, width, height,
                   static_cast<std::uint8_t>(CellClass::Free)) {}
};

// Decays all cells by lambda_decay, then deposits a truncated Gaussian splat
// (peak 1, cut at 3 sigma) per point. Points inside the mask are dropped and
// masked cells never receive evidence. Points off the grid are ignored.
void integrate_points(SemanticGrid& grid, const std::vector<Eigen::Vector2d>& points,
                      const RobotMask& mask, double lambda_decay, double sigma_deposit);

// Zeroes occupancy for cells whose centers fall inside the mask.
void mask_robot(SemanticGrid& grid, const RobotMask& mask);

// Binary map: 1 where occupancy >= theta_occ (closed threshold).
GridU8 threshold_occupied(const SemanticGrid& grid, double theta_occ);

// Occupied cells within label_radius of a Human track become Human, the rest
// of the occupied cells StaticObstacle, free cells Free.
void label_cells(SemanticGrid& grid, const GridU8& occupied, const std::vector<Track>& tracks,
                 double label_radius);

}  // namespace sage
