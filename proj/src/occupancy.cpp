// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/log.hpp>
#include <sage/occupancy.hpp>

#include <algorithm>
#include <cmath>

namespace sage {

bool RobotMask::contains(const Eigen::Vector2d& q) const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Eigen::Vector2d d = q - center;
  const double bx = c * d.x() + s * d.y();
  const double by = -s * d.x() + c * d.y();
  return std::pow(std::abs(bx / a), p) + std::pow(std::abs(by / b), p) <= 1.0;
}

void integrate_points(SemanticGrid& grid, const std::vector<Eigen::Vector2d>& points,
                      const RobotMask& mask, double lambda_decay, double sigma_deposit) {
  grid.occupancy.array() *= lambda_decay;

  const double res = grid.occupancy.resolution();
  const int reach = sigma_deposit > 0.0 ? static_cast<int>(std::ceil(3.0 * sigma_deposit / res)) : 0;
  const double inv2s2 = sigma_deposit > 0.0 ? 1.0 / (2.0 * sigma_deposit * sigma_deposit) : 0.0;

  for (const auto& pt : points) {
    if (!grid.occupancy.containsPoint(pt.x(), pt.y())) {
      log::debug("integrate_points: dropping off-grid point (%g, %g)", pt.x(), pt.y());
      continue;
    }
    if (mask.contains(pt)) continue;
    const Eigen::Vector2i c = grid.occupancy.worldToCell(pt);
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const int ix = c.x() + dx, iy = c.y() + dy;
        if (!grid.occupancy.inBounds(ix, iy)) continue;
        const Eigen::Vector2d cc = grid.occupancy.cellCenter(ix, iy);
        if (mask.contains(cc)) continue;
        double k;
        if (reach == 0) {
          k = 1.0;
        } else {
          const double r2 = (cc - pt).squaredNorm();
          if (r2 > 9.0 * sigma_deposit * sigma_deposit) continue;
          k = std::exp(-r2 * inv2s2);
        }
        double& v = grid.occupancy(ix, iy);
        v = std::min(1.0, v + k);
      }
    }
  }
}

void mask_robot(SemanticGrid& grid, const RobotMask& mask) {
  // Bounding box of the mask keeps this cheap on big grids.
  const double reach = std::max(mask.a, mask.b);
  const Eigen::Vector2i lo = grid.occupancy.worldToCell(mask.center.array() - reach);
  const Eigen::Vector2i hi = grid.occupancy.worldToCell(mask.center.array() + reach);
  for (int iy = std::max(0, lo.y()); iy <= std::min(grid.occupancy.height() - 1, hi.y()); ++iy)
    for (int ix = std::max(0, lo.x()); ix <= std::min(grid.occupancy.width() - 1, hi.x()); ++ix)
      if (mask.contains(grid.occupancy.cellCenter(ix, iy))) grid.occupancy(ix, iy) = 0.0;
}

GridU8 threshold_occupied(const SemanticGrid& grid, double theta_occ) {
  GridU8 out(grid.occupancy.origin(), grid.occupancy.resolution(), grid.occupancy.width(),
             grid.occupancy.height());
  out.array() = (grid.occupancy.array() >= theta_occ).template cast<std::uint8_t>();
  return out;
}

void label_cells(SemanticGrid& grid, const GridU8& occupied, const std::vector<Track>& tracks,
                 double label_radius) {
  std::vector<Eigen::Vector2d> humans;
  for (const auto& t : tracks)
    if (t.label == TrackLabel::Human) humans.push_back(t.position);

  const double r2 = label_radius * label_radius;
  for (int iy = 0; iy < occupied.height(); ++iy) {
    for (int ix = 0; ix < occupied.width(); ++ix) {
      if (!occupied(ix, iy)) {
        grid.cell_class(ix, iy) = static_cast<std::uint8_t>(CellClass::Free);
        continue;
      }
      const Eigen::Vector2d cc = occupied.cellCenter(ix, iy);
      bool human = false;
      for (const auto& h : humans)
        if ((cc - h).squaredNorm() <= r2) {
          human = true;
          break;
        }
      grid.cell_class(ix, iy) =
          static_cast<std::uint8_t>(human ? CellClass::Human : CellClass::StaticObstacle);
    }
  }
}

}  // namespace sage
