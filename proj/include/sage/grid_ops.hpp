// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/grid.hpp>
#include <vector>

namespace sage {

/// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher).
/// Returns per-cell squared distance, in cells, to the nearest cell where
/// `seed` is nonzero. Cells outside the grid are not seeds. Seed cells get 0.
GridF edt_squared(const GridU8& seed);

/// Metric distance (m) to the nearest seed cell center.
GridF edt_distance(const GridU8& seed);

/// Gaussian blur restricted to a mask: only cells with mask != 0 contribute,
/// weights are renormalized over the covered support, and cells outside the
/// mask are left untouched. sigma is in meters; kernel truncated at 3 sigma.
GridF gaussian_smooth_masked(const GridF& in, const GridU8& mask, double sigma);

/// 8-connected component labels over nonzero cells. Background label is -1,
/// components are numbered 0..n-1 in scan order. Returns the label grid and
/// the component count.
std::pair<GridI32, int> connected_components(const GridU8& occupied);

/// Bilinear sample of a grid at continuous cell-index coordinates (cell
/// centers at integers). The 2x2 stencil is clamped at the array edges.
double bilinear_at_index(const GridF& g, double jx, double jy);

/// Label every cell with the index of its nearest nonzero seed cell
/// (multi-source BFS over 8-neighbors; grid-metric approximation of the
/// Euclidean nearest-seed map, used only for ownership decisions).
GridI32 nearest_seed_labels(const GridU8& seed, const GridI32& seed_ids);

}  // namespace sage
