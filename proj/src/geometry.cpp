// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/geometry.hpp>
#include <sage/grid_ops.hpp>
#include <sage/log.hpp>

#include <algorithm>
#include <cmath>

namespace sage {

PassSide pass_side_from_string(const std::string& s) {
  if (s == "Left") return PassSide::Left;
  if (s == "Right") return PassSide::Right;
  throw ConfigError("pass_side must be Left or Right, got: " + s);
}

std::vector<Eigen::Vector2i> footprint_stencil(double a_f, double b_f, double psi, double pad,
                                               double resolution) {
  const double c = std::abs(std::cos(psi)), s = std::abs(std::sin(psi));
  const double half = 0.5 * resolution + pad;
  const int reach =
      static_cast<int>(std::ceil((std::max(a_f, b_f) + half) / resolution)) + 1;

  std::vector<Eigen::Vector2i> out;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double px = dx * resolution, py = dy * resolution;
      if (std::abs(px) > half + a_f * c + b_f * s) continue;
      if (std::abs(py) > half + a_f * s + b_f * c) continue;
      const double cc = std::cos(psi), ss = std::sin(psi);
      if (std::abs(px * cc + py * ss) > a_f + half * (c + s)) continue;
      if (std::abs(-px * ss + py * cc) > b_f + half * (s + c)) continue;
      out.emplace_back(dx, dy);
    }
  }
  return out;
}

namespace {

void dilate(const GridU8& src, const std::vector<Eigen::Vector2i>& stencil, GridU8& dst) {
  for (int iy = 0; iy < src.height(); ++iy)
    for (int ix = 0; ix < src.width(); ++ix) {
      if (!src(ix, iy)) continue;
      for (const auto& d : stencil) {
        const int jx = ix + d.x(), jy = iy + d.y();
        if (dst.inBounds(jx, jy)) dst(jx, jy) = 1;
      }
    }
}

GridU8 layout_like(const GridU8& g) {
  return GridU8(g.origin(), g.resolution(), g.width(), g.height());
}

void mark_boundary(const GridU8& free, GridU8& boundary) {
  static constexpr int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int iy = 0; iy < free.height(); ++iy)
    for (int ix = 0; ix < free.width(); ++ix) {
      if (free(ix, iy)) continue;
      for (const auto& o : off)
        if (free.inBounds(ix + o[0], iy + o[1]) && free(ix + o[0], iy + o[1])) {
          boundary(ix, iy) = 1;
          break;
        }
    }
}

}  // namespace

GridU8 inflate_by_footprint(const GridU8& occupied, double a_f, double b_f, double psi) {
  const auto stencil = footprint_stencil(a_f, b_f, psi, 0.0, occupied.resolution());
  GridU8 blocked = layout_like(occupied);
  dilate(occupied, stencil, blocked);
  GridU8 free = layout_like(occupied);
  free.array() = 1 - blocked.array();
  if ((free.array() != 0).count() == 0) throw FieldDomainEmpty("footprint inflation left no free cell");
  return free;
}

ErodeResult erode(const GridU8& free, double r) {
  GridU8 seed = layout_like(free);
  seed.array() = 1 - free.array();  // non-free cells seed the distance field
  const GridF d2 = edt_squared(seed);
  // Distance is measured to the non-free cell square, approximated as the
  // center distance minus half a cell, so eroding by less than one cell
  // still strips the one-cell rim.
  const double r_cells = r / free.resolution() + 0.5;
  const double r_cells2 = r_cells * r_cells;

  ErodeResult out{layout_like(free), layout_like(free), false};
  for (int iy = 0; iy < free.height(); ++iy)
    for (int ix = 0; ix < free.width(); ++ix)
      out.buffered(ix, iy) = free(ix, iy) && d2(ix, iy) > r_cells2 ? 1 : 0;

  static constexpr int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int iy = 0; iy < free.height(); ++iy)
    for (int ix = 0; ix < free.width(); ++ix) {
      if (!free(ix, iy) || out.buffered(ix, iy)) continue;
      for (const auto& o : off)
        if (free.inBounds(ix + o[0], iy + o[1]) && out.buffered(ix + o[0], iy + o[1])) {
          out.interface_(ix, iy) = 1;
          break;
        }
    }

  // A band component touching two distinct obstacle components means the
  // buffered annuli merged.
  GridU8 band = layout_like(free);
  band.array() = (free.array() != 0 && out.buffered.array() == 0).template cast<std::uint8_t>();
  auto [obst_ids, n_obst] = connected_components(seed);
  if (n_obst > 1) {
    const GridI32 owner = nearest_seed_labels(seed, obst_ids);
    auto [band_ids, n_band] = connected_components(band);
    std::vector<int> first_owner(static_cast<std::size_t>(n_band), -1);
    for (int iy = 0; iy < free.height() && !out.overlap; ++iy)
      for (int ix = 0; ix < free.width(); ++ix) {
        const int bid = band_ids(ix, iy);
        if (bid < 0) continue;
        const int own = owner(ix, iy);
        if (own < 0) continue;
        auto& f = first_owner[static_cast<std::size_t>(bid)];
        if (f < 0) {
          f = own;
        } else if (f != own) {
          out.overlap = true;
          break;
        }
      }
    if (out.overlap) log::warn("erode: buffered bands of distinct obstacles merged");
  }
  return out;
}

BoundaryFrame boundary_frames(const GridU8& free, double sigma_n, PassSide side) {
  GridF chi(free.origin(), free.resolution(), free.width(), free.height());
  chi.array() = free.array().template cast<double>();
  GridU8 all = layout_like(free);
  all.fill(1);
  const GridF smooth = gaussian_smooth_masked(chi, all, sigma_n);

  BoundaryFrame fr(free);
  const int w = free.width(), h = free.height();
  const double res = free.resolution();
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      const int xm = std::max(0, ix - 1), xp = std::min(w - 1, ix + 1);
      const int ym = std::max(0, iy - 1), yp = std::min(h - 1, iy + 1);
      const double sx = xp > xm ? (smooth(xp, iy) - smooth(xm, iy)) / ((xp - xm) * res) : 0.0;
      const double sy = yp > ym ? (smooth(ix, yp) - smooth(ix, ym)) / ((yp - ym) * res) : 0.0;
      const double mag = std::hypot(sx, sy);
      if (mag < 1e-9) continue;
      const double nx = -sx / mag, ny = -sy / mag;  // into the obstacle
      fr.nx(ix, iy) = nx;
      fr.ny(ix, iy) = ny;
      if (side == PassSide::Left) {
        fr.tx(ix, iy) = -ny;
        fr.ty(ix, iy) = nx;
      } else {
        fr.tx(ix, iy) = ny;
        fr.ty(ix, iy) = -nx;
      }
      fr.valid(ix, iy) = 1;
    }
  }
  return fr;
}

Domain build_domain(const GridU8& class_map, const GeometryParams& g,
                    const std::vector<std::string>& tangent_classes, double lambda_tangent,
                    int slice) {
  Domain dom(class_map);
  dom.slice = slice;
  dom.psi = 2.0 * M_PI * slice / g.n_psi;

  GridU8 human_src = layout_like(class_map);
  GridU8 static_src = layout_like(class_map);
  human_src.array() =
      (class_map.array() == static_cast<std::uint8_t>(CellClass::Human)).template cast<std::uint8_t>();
  static_src.array() = (class_map.array() == static_cast<std::uint8_t>(CellClass::StaticObstacle))
                           .template cast<std::uint8_t>();

  const double res = class_map.resolution();
  dilate(human_src, footprint_stencil(g.footprint_a, g.footprint_b, dom.psi, g.pad_human, res),
         dom.infl_human);
  dilate(static_src, footprint_stencil(g.footprint_a, g.footprint_b, dom.psi, g.pad_static, res),
         dom.infl_static);

  dom.free.array() =
      (dom.infl_human.array() == 0 && dom.infl_static.array() == 0).template cast<std::uint8_t>();
  if ((dom.free.array() != 0).count() == 0)
    throw FieldDomainEmpty("inflated obstacles cover the whole grid");

  mark_boundary(dom.free, dom.boundary);

  ErodeResult er = erode(dom.free, g.buffer_r);
  dom.buffered = std::move(er.buffered);
  dom.interface_ = std::move(er.interface_);
  dom.buffer_overlap = er.overlap;

  const bool human_tangent = std::find(tangent_classes.begin(), tangent_classes.end(), "Human") !=
                             tangent_classes.end();
  const bool static_tangent = std::find(tangent_classes.begin(), tangent_classes.end(),
                                        "StaticObstacle") != tangent_classes.end();
  if (lambda_tangent != 0.0 && (human_tangent || static_tangent)) {
    // Interface cells take tangential data only when their nearest obstacle
    // carries a tangent class. Squared cell distances are exact integers, so
    // the ownership comparison is exact.
    GridU8 nonfree = layout_like(class_map);
    nonfree.array() = 1 - dom.free.array();
    const GridF d_all = edt_squared(nonfree);
    const GridF d_human = edt_squared(dom.infl_human);
    const GridF d_static = edt_squared(dom.infl_static);
    for (int iy = 0; iy < class_map.height(); ++iy)
      for (int ix = 0; ix < class_map.width(); ++ix) {
        if (!dom.interface_(ix, iy)) continue;
        const bool near_h = d_human(ix, iy) <= d_all(ix, iy);
        const bool near_s = d_static(ix, iy) <= d_all(ix, iy);
        if ((human_tangent && near_h) || (static_tangent && near_s)) dom.iface_pin(ix, iy) = 1;
      }
  }
  return dom;
}

}  // namespace sage
