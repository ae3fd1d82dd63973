// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/grid.hpp>

#include <vector>

namespace sage {

enum class PassSide { Left, Right };

PassSide pass_side_from_string(const std::string& s);

// Unit normals pointing from free space into the obstacle, with tangents
// rotated +pi/2 (PassLeft) or -pi/2 (PassRight) from the normal.
struct BoundaryFrame {
  GridF nx, ny, tx, ty;
  GridU8 valid;

  explicit BoundaryFrame(const GridU8& layout)
      : nx(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        ny(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        tx(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        ty(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        valid(layout.origin(), layout.resolution(), layout.width(), layout.height()) {}
};

// Free-space geometry for one yaw slice.
struct Domain {
  int slice = 0;
  double psi = 0.0;
  GridU8 free;         // footprint-inflated free mask
  GridU8 boundary;     // non-free cells 4-adjacent to free (Dirichlet ring)
  GridU8 buffered;     // free cells farther than buffer_r from non-free
  GridU8 interface_;   // free rim between buffered and the rest
  GridU8 iface_pin;    // interface cells that take tangential Dirichlet data
  GridU8 infl_human;   // non-free due to a Human-class source
  GridU8 infl_static;  // non-free due to a StaticObstacle source
  bool buffer_overlap = false;

  explicit Domain(const GridU8& layout)
      : free(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        boundary(free.origin(), free.resolution(), free.width(), free.height()),
        buffered(free.origin(), free.resolution(), free.width(), free.height()),
        interface_(free.origin(), free.resolution(), free.width(), free.height()),
        iface_pin(free.origin(), free.resolution(), free.width(), free.height()),
        infl_human(free.origin(), free.resolution(), free.width(), free.height()),
        infl_static(free.origin(), free.resolution(), free.width(), free.height()) {}
};

// Cell offsets whose res-sized square, grown by pad, overlaps the robot
// rectangle with half-extents (a_f, b_f) at yaw psi centered on the origin
// cell. Separating-axis test, touching counts as overlap.
std::vector<Eigen::Vector2i> footprint_stencil(double a_f, double b_f, double psi, double pad,
                                               double resolution);

// Free mask after dilating occupied cells by the rotated footprint.
// Throws FieldDomainEmpty when nothing stays free.
GridU8 inflate_by_footprint(const GridU8& occupied, double a_f, double b_f, double psi);

struct ErodeResult {
  GridU8 buffered;
  GridU8 interface_;
  bool overlap = false;  // buffered bands of distinct obstacles merged
};

// Pontryagin difference with the open ball of radius r: buffered keeps free
// cells whose center lies farther than r from the nearest non-free cell
// square (center distance minus half a cell).
ErodeResult erode(const GridU8& free, double r);

// Normals from the central-difference gradient of the Gaussian-smoothed free
// indicator; cells with gradient magnitude below 1e-9 stay invalid.
BoundaryFrame boundary_frames(const GridU8& free, double sigma_n, PassSide side);

// Full slice assembly from a class map: class-aware padding, footprint
// dilation, erosion, and tangent-class gating of the interface pin.
Domain build_domain(const GridU8& class_map, const GeometryParams& g,
                    const std::vector<std::string>& tangent_classes, double lambda_tangent,
                    int slice);

}  // namespace sage
