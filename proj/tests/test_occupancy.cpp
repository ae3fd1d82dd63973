// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/occupancy.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sage;

namespace {

RobotMask far_mask() {
  RobotMask m;
  m.center = {1e6, 1e6};
  return m;
}

SemanticGrid make_grid(int w = 20, int h = 20, double res = 0.1) {
  return SemanticGrid({0.0, 0.0}, res, w, h);
}

}  // namespace

TEST_CASE("pure decay: empty point list halves occupancy at lambda 0.5") {
  SemanticGrid g = make_grid();
  g.occupancy.fill(0.8);
  integrate_points(g, {}, far_mask(), 0.5, 0.05);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) CHECK(g.occupancy(ix, iy) == doctest::Approx(0.4));
}

TEST_CASE("sigma 0 deposits a delta on the covering cell only") {
  SemanticGrid g = make_grid();
  integrate_points(g, {g.occupancy.cellCenter(7, 9)}, far_mask(), 1.0, 0.0);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      if (ix == 7 && iy == 9)
        CHECK(g.occupancy(ix, iy) == doctest::Approx(1.0));
      else
        CHECK(g.occupancy(ix, iy) == 0.0);
    }
}

TEST_CASE("one-cell sigma matches the direct truncated kernel") {
  const double res = 0.1, sigma = res;  // one cell
  SemanticGrid g = make_grid(21, 21, res);
  const Eigen::Vector2d p = g.occupancy.cellCenter(10, 10);
  integrate_points(g, {p}, far_mask(), 1.0, sigma);

  for (int iy = 0; iy < 21; ++iy)
    for (int ix = 0; ix < 21; ++ix) {
      const double d2 = (g.occupancy.cellCenter(ix, iy) - p).squaredNorm();
      double want = 0.0;
      if (!(d2 > 9.0 * sigma * sigma)) want = std::exp(-d2 / (2.0 * sigma * sigma));
      CHECK(g.occupancy(ix, iy) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("deposits clip at occupancy 1") {
  SemanticGrid g = make_grid();
  const Eigen::Vector2d p = g.occupancy.cellCenter(5, 5);
  integrate_points(g, {p, p, p}, far_mask(), 1.0, 0.0);
  CHECK(g.occupancy(5, 5) == doctest::Approx(1.0));
}

TEST_CASE("points inside the mask are dropped and masked cells take no deposit") {
  SemanticGrid g = make_grid();
  RobotMask m;
  m.center = g.occupancy.cellCenter(10, 10);
  m.a = m.b = 0.25;
  m.p = 2.0;
  integrate_points(g, {m.center}, m, 1.0, 0.0);
  CHECK(g.occupancy(10, 10) == 0.0);

  // A point just outside the mask still deposits, but not into masked cells.
  const Eigen::Vector2d q = g.occupancy.cellCenter(14, 10);
  integrate_points(g, {q}, m, 1.0, 0.3);
  CHECK(g.occupancy(14, 10) > 0.9);
  CHECK(g.occupancy(11, 10) == 0.0);  // inside mask radius 0.25 at res 0.1
}

TEST_CASE("points off the grid are ignored silently") {
  SemanticGrid g = make_grid();
  integrate_points(g, {{-5.0, -5.0}, {100.0, 3.0}}, far_mask(), 1.0, 0.1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) CHECK(g.occupancy(ix, iy) == 0.0);
}

TEST_CASE("integrate_points with lambda 1 and no points is the identity") {
  SemanticGrid g = make_grid();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.occupancy(ix, iy) = u(rng);
  SemanticGrid before = g;
  integrate_points(g, {}, far_mask(), 1.0, 0.05);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) CHECK(g.occupancy(ix, iy) == before.occupancy(ix, iy));
}

TEST_CASE("deposits never decrease a cell and decay never increases one") {
  SemanticGrid g = make_grid();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.occupancy(ix, iy) = u(rng);
  SemanticGrid decayed = g;
  integrate_points(decayed, {}, far_mask(), 0.7, 0.05);
  SemanticGrid deposited = decayed;
  integrate_points(deposited, {deposited.occupancy.cellCenter(3, 3)}, far_mask(), 1.0, 0.2);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      CHECK(decayed.occupancy(ix, iy) <= g.occupancy(ix, iy) + 1e-15);
      CHECK(deposited.occupancy(ix, iy) >= decayed.occupancy(ix, iy) - 1e-15);
      CHECK(deposited.occupancy(ix, iy) <= 1.0);
    }
}

TEST_CASE("mask_robot circle case zeroes cells within r") {
  SemanticGrid g = make_grid();
  g.occupancy.fill(1.0);
  RobotMask m;
  m.center = g.occupancy.cellCenter(10, 10);
  m.a = m.b = 0.35;
  m.p = 2.0;
  mask_robot(g, m);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      const double d = (g.occupancy.cellCenter(ix, iy) - m.center).norm();
      if (d <= 0.35)
        CHECK(g.occupancy(ix, iy) == 0.0);
      else
        CHECK(g.occupancy(ix, iy) == 1.0);
    }
}

TEST_CASE("mask_robot high exponent matches the pointwise inequality") {
  SemanticGrid g = make_grid(30, 30, 0.05);
  g.occupancy.fill(1.0);
  RobotMask m;
  m.center = {0.8, 0.7};
  m.a = 0.4;
  m.b = 0.2;
  m.p = 8.0;
  m.yaw = 0.6;
  mask_robot(g, m);
  const double c = std::cos(-m.yaw), s = std::sin(-m.yaw);
  for (int iy = 0; iy < 30; ++iy)
    for (int ix = 0; ix < 30; ++ix) {
      const Eigen::Vector2d d = g.occupancy.cellCenter(ix, iy) - m.center;
      const Eigen::Vector2d body(c * d.x() - s * d.y(), s * d.x() + c * d.y());
      const bool inside =
          std::pow(std::abs(body.x() / m.a), m.p) + std::pow(std::abs(body.y() / m.b), m.p) <=
          1.0;
      CHECK(g.occupancy(ix, iy) == (inside ? 0.0 : 1.0));
    }
}

TEST_CASE("mask fully outside the grid leaves it unchanged") {
  SemanticGrid g = make_grid();
  g.occupancy.fill(0.6);
  mask_robot(g, far_mask());
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) CHECK(g.occupancy(ix, iy) == 0.6);
}

TEST_CASE("mask_robot is idempotent") {
  SemanticGrid g = make_grid();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.occupancy(ix, iy) = u(rng);
  RobotMask m;
  m.center = {1.0, 1.0};
  mask_robot(g, m);
  SemanticGrid once = g;
  mask_robot(g, m);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) CHECK(g.occupancy(ix, iy) == once.occupancy(ix, iy));
}

TEST_CASE("threshold is closed at theta") {
  SemanticGrid g = make_grid(4, 1, 0.1);
  g.occupancy(0, 0) = 0.0;
  g.occupancy(1, 0) = 0.499999;
  g.occupancy(2, 0) = 0.5;
  g.occupancy(3, 0) = 0.9;
  const GridU8 occ = threshold_occupied(g, 0.5);
  CHECK(occ(0, 0) == 0);
  CHECK(occ(1, 0) == 0);
  CHECK(occ(2, 0) == 1);
  CHECK(occ(3, 0) == 1);
}

TEST_CASE("threshold agrees with the pointwise comparison on random grids") {
  SemanticGrid g = make_grid();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.occupancy(ix, iy) = u(rng);
  const GridU8 occ = threshold_occupied(g, 0.37);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix)
      CHECK(occ(ix, iy) == (g.occupancy(ix, iy) >= 0.37 ? 1 : 0));
}

TEST_CASE("label_cells with no tracks marks all occupied cells static") {
  SemanticGrid g = make_grid();
  g.occupancy(3, 3) = 1.0;
  g.occupancy(3, 4) = 1.0;
  const GridU8 occ = threshold_occupied(g, 0.5);
  label_cells(g, occ, {}, 0.5);
  CHECK(g.cell_class(3, 3) == static_cast<std::uint8_t>(CellClass::StaticObstacle));
  CHECK(g.cell_class(3, 4) == static_cast<std::uint8_t>(CellClass::StaticObstacle));
  CHECK(g.cell_class(0, 0) == static_cast<std::uint8_t>(CellClass::Free));
}

TEST_CASE("a human track labels the blob it covers") {
  SemanticGrid g = make_grid();
  for (int iy = 9; iy <= 11; ++iy)
    for (int ix = 9; ix <= 11; ++ix) g.occupancy(ix, iy) = 1.0;
  Track t;
  t.id = 0;
  t.position = g.occupancy.cellCenter(10, 10);
  t.label = TrackLabel::Human;
  const GridU8 occ = threshold_occupied(g, 0.5);
  label_cells(g, occ, {t}, 0.5);
  for (int iy = 9; iy <= 11; ++iy)
    for (int ix = 9; ix <= 11; ++ix)
      CHECK(g.cell_class(ix, iy) == static_cast<std::uint8_t>(CellClass::Human));
}

TEST_CASE("only the blob under the track goes Human, checked against distances") {
  SemanticGrid g = make_grid();
  for (int ix = 2; ix <= 3; ++ix) g.occupancy(ix, 5) = 1.0;    // blob A
  for (int ix = 14; ix <= 15; ++ix) g.occupancy(ix, 5) = 1.0;  // blob B
  Track t;
  t.position = g.occupancy.cellCenter(2, 5);
  t.label = TrackLabel::Human;
  const GridU8 occ = threshold_occupied(g, 0.5);
  const double radius = 0.35;
  label_cells(g, occ, {t}, radius);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      if (!occ(ix, iy)) {
        CHECK(g.cell_class(ix, iy) == static_cast<std::uint8_t>(CellClass::Free));
        continue;
      }
      const bool near = (g.occupancy.cellCenter(ix, iy) - t.position).norm() <= radius;
      CHECK(g.cell_class(ix, iy) ==
            static_cast<std::uint8_t>(near ? CellClass::Human : CellClass::StaticObstacle));
    }
}

TEST_CASE("label_cells partitions occupied cells into exactly two classes") {
  SemanticGrid g = make_grid();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.occupancy(ix, iy) = u(rng);
  Track t;
  t.position = {1.0, 1.0};
  t.label = TrackLabel::Human;
  const GridU8 occ = threshold_occupied(g, 0.5);
  label_cells(g, occ, {t}, 0.4);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) {
      const auto c = g.cell_class(ix, iy);
      if (occ(ix, iy))
        CHECK((c == static_cast<std::uint8_t>(CellClass::Human) ||
               c == static_cast<std::uint8_t>(CellClass::StaticObstacle)));
      else
        CHECK(c == static_cast<std::uint8_t>(CellClass::Free));
    }
}
