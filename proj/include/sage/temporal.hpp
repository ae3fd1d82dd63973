// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/grid.hpp>

#include <vector>

namespace sage {

// Holds the previous safety stack and the low-passed time derivative.
struct TemporalState {
  std::vector<GridF> h_prev;
  std::vector<GridF> dhdt;
  Eigen::Vector2d origin_prev{0.0, 0.0};
  double stamp_prev = 0.0;
  bool has_prev = false;
};

// Motion-compensated finite difference: raw(i,j,l) compares h_new against the
// previous stack resampled at the world location of cell (i,j), with bilinear
// sub-cell shifts; sources outside the previous grid give raw = 0. The result
// is low-passed with coefficient beta. First call yields an all-zero stack.
TemporalState update_dhdt(TemporalState state, const std::vector<GridF>& h_new, double stamp,
                          double beta);

// Open-space attenuation: min(|v| / (|grad h| + eps (1 - exp(-kappa max(0,h)))), 1).
// The 0/0 corner (h = 0, |grad h| = 0) returns 1.
double sigma_scale(double h, double grad_norm, double v_norm, double eps, double kappa);

}  // namespace sage
