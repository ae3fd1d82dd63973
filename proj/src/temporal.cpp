// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/grid_ops.hpp>
#include <sage/log.hpp>
#include <sage/temporal.hpp>

#include <algorithm>
#include <cmath>

namespace sage {

TemporalState update_dhdt(TemporalState state, const std::vector<GridF>& h_new, double stamp,
                          double beta) {
  TemporalState next;
  next.h_prev = h_new;
  next.origin_prev = h_new.empty() ? Eigen::Vector2d::Zero().eval() : h_new.front().origin();
  next.stamp_prev = stamp;
  next.has_prev = true;

  next.dhdt.reserve(h_new.size());
  const bool dims_match = state.has_prev && state.h_prev.size() == h_new.size() &&
                          (h_new.empty() || (state.h_prev.front().width() == h_new.front().width() &&
                                             state.h_prev.front().height() == h_new.front().height()));
  if (!dims_match) {
    for (const auto& h : h_new)
      next.dhdt.emplace_back(h.origin(), h.resolution(), h.width(), h.height());
    return next;
  }

  const double dt = stamp - state.stamp_prev;
  if (dt <= 0.0) throw ConfigError("update_dhdt: non-positive grid interval");

  for (std::size_t l = 0; l < h_new.size(); ++l) {
    const GridF& hn = h_new[l];
    const GridF& hp = state.h_prev[l];
    GridF out(hn.origin(), hn.resolution(), hn.width(), hn.height());
    // Shift, in previous-grid index units, of the world location of cell (0,0).
    const double sx = (hn.origin().x() - state.origin_prev.x()) / hp.resolution();
    const double sy = (hn.origin().y() - state.origin_prev.y()) / hp.resolution();
    const bool same_layout = state.dhdt.size() == h_new.size() &&
                             state.dhdt[l].sameLayout(hn);
    for (int iy = 0; iy < hn.height(); ++iy) {
      for (int ix = 0; ix < hn.width(); ++ix) {
        const double jx = ix + sx, jy = iy + sy;
        double raw = 0.0;
        if (jx >= 0.0 && jx <= hp.width() - 1.0 && jy >= 0.0 && jy <= hp.height() - 1.0)
          raw = (hn(ix, iy) - bilinear_at_index(hp, jx, jy)) / dt;
        const double prev = same_layout ? state.dhdt[l](ix, iy) : 0.0;
        out(ix, iy) = (1.0 - beta) * prev + beta * raw;
      }
    }
    next.dhdt.push_back(std::move(out));
  }
  return next;
}

double sigma_scale(double h, double grad_norm, double v_norm, double eps, double kappa) {
  const double denom = grad_norm + eps * (1.0 - std::exp(-kappa * std::max(0.0, h)));
  if (denom <= 0.0) {
    log::debug("sigma_scale: degenerate 0/0 at h=%g, returning 1", h);
    return 1.0;
  }
  return std::min(v_norm / denom, 1.0);
}

}  // namespace sage
