// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/svg.hpp>

#include <doctest.h>

#include <cmath>

using namespace sage;

namespace {

FieldStack tiny_stack() {
  const int w = 24, h = 18;
  const double res = 0.1;
  FieldStack st;
  st.origin = {0, 0};
  st.resolution = res;
  st.width = w;
  st.height = h;
  st.n_psi = 1;
  GridF hg({0, 0}, res, w, h);
  GridU8 free({0, 0}, res, w, h, 1);
  GuidanceSlice v(free);
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      hg(ix, iy) = static_cast<float>(hg.cellCenter(ix, iy).x());
      v.vx(ix, iy) = 0.3f;
      v.vy(ix, iy) = 0.1f;
      if (ix >= 8 && ix < 12 && iy >= 6 && iy < 10) free(ix, iy) = 0;
    }
  SafetySlice ss(hg);
  st.h_max = w * res;
  st.max_grad = 1.0;
  st.v.push_back(std::move(v));
  st.s.push_back(std::move(ss));
  st.dpsi.emplace_back(Eigen::Vector2d(0, 0), res, w, h);
  st.dhdt.emplace_back(Eigen::Vector2d(0, 0), res, w, h);
  st.free.push_back(std::move(free));
  return st;
}

}  // namespace

TEST_CASE("contours of a linear ramp are vertical lines at the level") {
  GridF g({0, 0}, 0.1, 30, 12);
  for (int iy = 0; iy < 12; ++iy)
    for (int ix = 0; ix < 30; ++ix) g(ix, iy) = static_cast<float>(g.cellCenter(ix, iy).x());
  const float level = 1.23f;
  const auto segs = contour_segments(g, nullptr, level);
  CHECK(segs.size() == 11);  // one segment per adjacent row pair
  for (const auto& s : segs) {
    CHECK(s[0].x() == doctest::Approx(level).epsilon(1e-5));
    CHECK(s[1].x() == doctest::Approx(level).epsilon(1e-5));
    CHECK(std::abs(s[0].y() - s[1].y()) == doctest::Approx(0.1));
  }
}

TEST_CASE("the zero contour of a signed disc traces the circle") {
  const int n = 60;
  const double res = 0.05, R = 1.0;
  GridF g({0, 0}, res, n, n);
  const Eigen::Vector2d c(1.5, 1.5);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      g(ix, iy) = static_cast<float>(R - (g.cellCenter(ix, iy) - c).norm());
  const auto segs = contour_segments(g, nullptr, 0.0f);
  REQUIRE(!segs.empty());
  double len = 0.0;
  for (const auto& s : segs) {
    for (const auto& p : s) CHECK(std::abs((p - c).norm() - R) < res);
    len += (s[1] - s[0]).norm();
  }
  CHECK(len == doctest::Approx(2 * M_PI * R).epsilon(0.1));
}

TEST_CASE("masked cells contribute no contour segments") {
  const int n = 60;
  const double res = 0.05, R = 1.0;
  GridF g({0, 0}, res, n, n);
  GridU8 mask({0, 0}, res, n, n);
  const Eigen::Vector2d c(1.5, 1.5);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      g(ix, iy) = static_cast<float>(R - (g.cellCenter(ix, iy) - c).norm());
      mask(ix, iy) = g.cellCenter(ix, iy).x() >= c.x() ? 1 : 0;
    }
  const auto segs = contour_segments(g, &mask, 0.0f);
  REQUIRE(!segs.empty());
  for (const auto& s : segs)
    for (const auto& p : s) CHECK(p.x() >= c.x() - 2 * res);
}

TEST_CASE("saddle cells split into two segments by the center rule") {
  GridF g({0, 0}, 1.0, 2, 2);
  g(0, 0) = 1.0f;
  g(1, 0) = 0.0f;
  g(1, 1) = 1.0f;
  g(0, 1) = 0.0f;
  CHECK(contour_segments(g, nullptr, 0.5f).size() == 2);
  g(0, 0) = 0.9f;  // center average now below the level: same count, other pairing
  CHECK(contour_segments(g, nullptr, 0.5f).size() == 2);
}

TEST_CASE("a slice renders to a complete SVG document") {
  const FieldStack st = tiny_stack();
  PlotOverlay ov;
  ov.trajectory = {{0.3, 0.3}, {1.0, 0.8}, {2.0, 1.2}};
  ov.has_robot = true;
  ov.robot_x = 2.0;
  ov.robot_y = 1.2;
  ov.robot_psi = 0.7;
  ov.footprint_a = 0.3;
  ov.footprint_b = 0.2;
  ov.agent_centers = {{1.2, 1.5}};
  ov.agent_radii = {0.3};

  const std::string svg = field_svg(st, 0, ov);
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<rect") != std::string::npos);      // occupied block
  CHECK(svg.find("<polyline") != std::string::npos);  // trajectory
  CHECK(svg.find("<circle") != std::string::npos);    // agent disc
  CHECK(svg.find("rotate(") != std::string::npos);    // robot footprint
  CHECK(svg.find("<path") != std::string::npos);      // quiver or contours

  CHECK(field_svg(st, 0, ov) == svg);  // deterministic
  CHECK_THROWS_AS(field_svg(st, 1), ConfigError);
  CHECK_THROWS_AS(field_svg(st, -1), ConfigError);
}
