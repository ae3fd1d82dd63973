// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sage {

namespace {

Eigen::Vector2d edge_point(const GridF& g, float level, int ax, int ay, int bx, int by) {
  const double va = g(ax, ay), vb = g(bx, by);
  double t = 0.5;
  if (std::abs(vb - va) > 1e-30) t = std::clamp((level - va) / (vb - va), 0.0, 1.0);
  const Eigen::Vector2d pa = g.cellCenter(ax, ay), pb = g.cellCenter(bx, by);
  return pa + t * (pb - pa);
}

void fmt(std::string& out, const char* f, double a, double b, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  out += buf;
}

}  // namespace

std::vector<std::array<Eigen::Vector2d, 2>> contour_segments(const GridF& grid,
                                                             const GridU8* mask, float level) {
  std::vector<std::array<Eigen::Vector2d, 2>> segs;
  const int w = grid.width(), h = grid.height();
  for (int iy = 0; iy + 1 < h; ++iy)
    for (int ix = 0; ix + 1 < w; ++ix) {
      if (mask && (!(*mask)(ix, iy) || !(*mask)(ix + 1, iy) || !(*mask)(ix, iy + 1) ||
                   !(*mask)(ix + 1, iy + 1)))
        continue;
      const double v0 = grid(ix, iy), v1 = grid(ix + 1, iy), v2 = grid(ix + 1, iy + 1),
                   v3 = grid(ix, iy + 1);
      const int code = (v0 > level ? 1 : 0) | (v1 > level ? 2 : 0) | (v2 > level ? 4 : 0) |
                       (v3 > level ? 8 : 0);
      if (code == 0 || code == 15) continue;

      // Edge crossings: 0 bottom, 1 right, 2 top, 3 left.
      auto ep = [&](int e) -> Eigen::Vector2d {
        switch (e) {
          case 0: return edge_point(grid, level, ix, iy, ix + 1, iy);
          case 1: return edge_point(grid, level, ix + 1, iy, ix + 1, iy + 1);
          case 2: return edge_point(grid, level, ix, iy + 1, ix + 1, iy + 1);
          default: return edge_point(grid, level, ix, iy, ix, iy + 1);
        }
      };
      auto add = [&](int a, int b) { segs.push_back({ep(a), ep(b)}); };

      switch (code) {
        case 1: add(3, 0); break;
        case 2: add(0, 1); break;
        case 3: add(3, 1); break;
        case 4: add(1, 2); break;
        case 5:
          if (0.25 * (v0 + v1 + v2 + v3) > level) {
            add(0, 1);
            add(2, 3);
          } else {
            add(3, 0);
            add(1, 2);
          }
          break;
        case 6: add(0, 2); break;
        case 7: add(3, 2); break;
        case 8: add(2, 3); break;
        case 9: add(0, 2); break;
        case 10:
          if (0.25 * (v0 + v1 + v2 + v3) > level) {
            add(3, 0);
            add(1, 2);
          } else {
            add(0, 1);
            add(2, 3);
          }
          break;
        case 11: add(1, 2); break;
        case 12: add(3, 1); break;
        case 13: add(0, 1); break;
        case 14: add(3, 0); break;
        default: break;
      }
    }
  return segs;
}

std::string field_svg(const FieldStack& stack, int slice, const PlotOverlay& overlay,
                      int px_per_m, int n_contours, int quiver_stride) {
  if (slice < 0 || slice >= stack.n_psi) throw ConfigError("field_svg: slice out of range");
  const double res = stack.resolution;
  const double wm = stack.width * res, hm = stack.height * res;
  const double s = px_per_m;
  const double ox = stack.origin.x(), oy = stack.origin.y();
  auto X = [&](double x) { return (x - ox) * s; };
  auto Y = [&](double y) { return (hm - (y - oy)) * s; };

  std::string out;
  char head[256];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %.1f %.1f\">\n",
                static_cast<int>(std::lround(wm * s)), static_cast<int>(std::lround(hm * s)),
                wm * s, hm * s);
  out += head;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // Occupied cells as row runs.
  const GridU8& free = stack.free[static_cast<std::size_t>(slice)];
  out += "<g fill=\"#53585f\">\n";
  for (int iy = 0; iy < stack.height; ++iy) {
    int run = -1;
    for (int ix = 0; ix <= stack.width; ++ix) {
      const bool solid = ix < stack.width && !free(ix, iy);
      if (solid && run < 0) run = ix;
      if (!solid && run >= 0) {
        const Eigen::Vector2d a = free.cellCenter(run, iy);
        fmt(out, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\"/>\n",
            X(a.x() - res / 2), Y(a.y() + res / 2), (ix - run) * res * s, res * s);
        run = -1;
      }
    }
  }
  out += "</g>\n";

  // Guidance quiver.
  const GuidanceSlice& gv = stack.v[static_cast<std::size_t>(slice)];
  out += "<g stroke=\"#9467bd\" stroke-width=\"1\" fill=\"none\">\n";
  for (int iy = quiver_stride / 2; iy < stack.height; iy += quiver_stride)
    for (int ix = quiver_stride / 2; ix < stack.width; ix += quiver_stride) {
      if (!free(ix, iy)) continue;
      Eigen::Vector2d v(gv.vx(ix, iy), gv.vy(ix, iy));
      const double n = v.norm();
      if (n < 1e-6) continue;
      const Eigen::Vector2d c = free.cellCenter(ix, iy);
      const double len = 0.45 * quiver_stride * res * std::min(1.0, n);
      const Eigen::Vector2d tip = c + (len / n) * v;
      const Eigen::Vector2d back = (0.3 * len / n) * v;
      const Eigen::Vector2d side(-back.y() * 0.5, back.x() * 0.5);
      fmt(out, "<path d=\"M%.2f %.2f L%.2f %.2f ", X(c.x()), Y(c.y()), X(tip.x()), Y(tip.y()));
      fmt(out, "M%.2f %.2f L%.2f %.2f ", X(tip.x() - back.x() + side.x()),
          Y(tip.y() - back.y() + side.y()), X(tip.x()), Y(tip.y()));
      fmt(out, "L%.2f %.2f\"/>\n", X(tip.x() - back.x() - side.x()),
          Y(tip.y() - back.y() - side.y()));
    }
  out += "</g>\n";

  // h contours: zero level bold, then evenly spaced positive levels.
  const GridF& h = stack.s[static_cast<std::size_t>(slice)].h;
  auto draw_level = [&](float level, const char* colour, double width) {
    const auto segs = contour_segments(h, nullptr, level);
    if (segs.empty()) return;
    char open_tag[128];
    std::snprintf(open_tag, sizeof open_tag,
                  "<g stroke=\"%s\" stroke-width=\"%.2f\" fill=\"none\"><path d=\"", colour,
                  width);
    out += open_tag;
    for (const auto& sg : segs)
      fmt(out, "M%.2f %.2f L%.2f %.2f ", X(sg[0].x()), Y(sg[0].y()), X(sg[1].x()), Y(sg[1].y()));
    out += "\"/></g>\n";
  };
  draw_level(0.0f, "#000000", 2.0);
  if (stack.h_max > 0.0)
    for (int k = 1; k <= n_contours; ++k)
      draw_level(static_cast<float>(stack.h_max * k / (n_contours + 1)), "#1f77b4", 1.0);

  // Overlay.
  if (overlay.trajectory.size() >= 2) {
    out += "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\" points=\"";
    for (const auto& p : overlay.trajectory) fmt(out, "%.2f,%.2f ", X(p.x()), Y(p.y()));
    out += "\"/>\n";
  }
  for (std::size_t i = 0; i < overlay.agent_centers.size(); ++i) {
    const double r = i < overlay.agent_radii.size() ? overlay.agent_radii[i] : 0.3;
    fmt(out,
        "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"#ff7f0e\" fill-opacity=\"0.6\"/>\n",
        X(overlay.agent_centers[i].x()), Y(overlay.agent_centers[i].y()), r * s);
  }
  if (overlay.has_robot) {
    const double a = overlay.footprint_a > 0 ? overlay.footprint_a : 0.05;
    const double b = overlay.footprint_b > 0 ? overlay.footprint_b : 0.05;
    char tag[256];
    std::snprintf(tag, sizeof tag,
                  "<g transform=\"translate(%.2f %.2f) rotate(%.2f)\">"
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"#d62728\" fill-opacity=\"0.8\"/>"
                  "<line x1=\"0\" y1=\"0\" x2=\"%.2f\" y2=\"0\" stroke=\"#ffffff\"/></g>\n",
                  X(overlay.robot_x), Y(overlay.robot_y), -overlay.robot_psi * 180.0 / M_PI,
                  -a * s, -b * s, 2 * a * s, 2 * b * s, a * s);
    out += tag;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sage
