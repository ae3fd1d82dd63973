// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/geometry.hpp>
#include <sage/grid.hpp>
#include <sage/occupancy.hpp>
#include <sage/temporal.hpp>

#include <optional>
#include <vector>

namespace sage {

struct GuidanceSlice {
  GridF vx, vy;

  explicit GuidanceSlice(const GridU8& layout)
      : vx(layout.origin(), layout.resolution(), layout.width(), layout.height()),
        vy(layout.origin(), layout.resolution(), layout.width(), layout.height()) {}
};

struct SafetySlice {
  GridF h, f, gx, gy;

  explicit SafetySlice(const GridF& h_)
      : h(h_),
        f(h_.origin(), h_.resolution(), h_.width(), h_.height()),
        gx(h_.origin(), h_.resolution(), h_.width(), h_.height()),
        gy(h_.origin(), h_.resolution(), h_.width(), h_.height()) {}
};

// Immutable snapshot consumed by the filters.
struct FieldStack {
  Eigen::Vector2d origin{0.0, 0.0};
  double resolution = 0.05;
  int width = 0, height = 0, n_psi = 0;
  bool open = false;  // no obstacles anywhere: filters pass commands through
  double h_max = 0.0;
  double max_grad = 0.0;  // largest gradient magnitude over free cells
  double stamp = 0.0;
  std::vector<GuidanceSlice> v;
  std::vector<SafetySlice> s;
  std::vector<GridF> dpsi;
  std::vector<GridF> dhdt;
  std::vector<GridU8> free;  // per-slice masks, kept for exports and renders

  bool containsPoint(double x, double y) const;
};

struct Sample {
  double h = 0.0;
  Eigen::Vector2d grad{0.0, 0.0};
  Eigen::Vector2d v{0.0, 0.0};
  double dh_dpsi = 0.0;
  double dh_dt = 0.0;
};

struct SorResult {
  int iterations = 0;
  double last_update = 0.0;
};

// Red-black SOR on the 5-point Laplacian over cells where interior != 0.
// Other cells act as Dirichlet data; grid-edge neighbors mirror (zero normal
// derivative). rhs may be null for the homogeneous problem. Converges when
// the largest relaxed update and the remaining-error estimate implied by the
// update decay rate both drop below tol; throws SolverDiverged after
// max_iter sweeps.
SorResult sor_solve(GridF& u, const GridU8& interior, const GridF* rhs, double omega, double tol,
                    int max_iter);

// Boundary-normal flux magnitude per Dirichlet ring cell: b_human where a
// Human source reaches the cell, b_objects for static-only, the more negative
// value where both do.
GridF class_flux(const Domain& dom, double b_human, double b_objects);

// Harmonic guidance components with v = flux * n on the obstacle ring and
// v = lambda * t on pinned interface cells. Frames for the ring come from
// boundary_fr, frames for the interface from iface_fr.
GuidanceSlice solve_laplace(const Domain& dom, const BoundaryFrame& boundary_fr,
                            const BoundaryFrame& iface_fr, const GridF& flux,
                            const GridF& lambda, const FieldParams& fp,
                            const GuidanceSlice* warm = nullptr);

// Central differences inside the grid, one-sided on the grid edge; evaluated
// on free cells only.
GridF divergence(const GuidanceSlice& slice, const GridU8& free);

// f = gaussian_smooth(min(scale * div, -c_min)) over the free mask.
GridF forcing(const GridF& div, const GridU8& free, const FieldParams& fp);

// Dirichlet Poisson solve of lap h = f with h = 0 on the obstacle ring.
GridF solve_poisson(const Domain& dom, const GridF& f, const FieldParams& fp,
                    const GridF* warm = nullptr);

// Extends h linearly negative into obstacles (depth times the mean boundary
// gradient) and fills the central-difference gradient grids.
SafetySlice finish_safety(const Domain& dom, const GridF& h, GridF f);

struct YawDerivative {
  std::vector<GridF> dpsi;
  bool degenerate = false;  // fewer than 3 slices: all zero
};

// Central difference across adjacent yaw slices with wraparound.
YawDerivative yaw_derivative(const std::vector<GridF>& h_slices);

// Trilinear interpolation over (x, y, psi) with a periodic yaw axis.
// Throws OutOfBounds when (x, y) leaves the grid extent.
Sample sample(const FieldStack& stack, double x, double y, double psi);

// Same interpolation with the query clamped to the extent (plan rollouts may
// poke past the edge).
Sample sample_clamped(const FieldStack& stack, double x, double y, double psi);

// Per-tick synthesis: domains, guidance, forcing, safety, yaw and time
// derivatives, warm-started from the previous tick.
class FieldSynthesizer {
 public:
  explicit FieldSynthesizer(const Params& params) : params_(params) {}

  FieldStack synthesize(const SemanticGrid& grid, double now);

  const Params& params() const { return params_; }

 private:
  Params params_;
  std::optional<FieldStack> prev_;
  TemporalState temporal_;
};

}  // namespace sage
