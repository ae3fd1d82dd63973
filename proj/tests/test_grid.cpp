// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/grid.hpp>

#include <doctest.h>

using namespace sage;

TEST_CASE("cell centers sit half a cell past the corner") {
  GridF g({1.0, 2.0}, 0.5, 4, 3);
  CHECK(g.cellCenter(0, 0).x() == doctest::Approx(1.25));
  CHECK(g.cellCenter(0, 0).y() == doctest::Approx(2.25));
  CHECK(g.cellCenter(3, 2).x() == doctest::Approx(2.75));
  CHECK(g.cellCenter(3, 2).y() == doctest::Approx(3.25));
}

TEST_CASE("worldToCell floors into the covering cell") {
  GridF g({0.0, 0.0}, 0.5, 4, 4);
  CHECK(g.worldToCell({0.0, 0.0}) == Eigen::Vector2i(0, 0));
  CHECK(g.worldToCell({0.49, 0.49}) == Eigen::Vector2i(0, 0));
  CHECK(g.worldToCell({0.5, 0.0}) == Eigen::Vector2i(1, 0));
  CHECK(g.worldToCell({-0.1, 0.2}) == Eigen::Vector2i(-1, 0));
}

TEST_CASE("worldToIndex puts cell centers on integers") {
  GridF g({2.0, -1.0}, 0.25, 8, 8);
  for (int iy = 0; iy < 8; ++iy)
    for (int ix = 0; ix < 8; ++ix) {
      const Eigen::Vector2d idx = g.worldToIndex(g.cellCenter(ix, iy));
      CHECK(idx.x() == doctest::Approx(ix).epsilon(1e-12));
      CHECK(idx.y() == doctest::Approx(iy).epsilon(1e-12));
    }
}

TEST_CASE("operator() addresses (ix, iy) over row-major storage") {
  GridF g({0, 0}, 1.0, 3, 2);
  int v = 0;
  for (int iy = 0; iy < 2; ++iy)
    for (int ix = 0; ix < 3; ++ix) g(ix, iy) = v++;
  CHECK(g(0, 0) == 0);
  CHECK(g(2, 0) == 2);
  CHECK(g(0, 1) == 3);
  // row-major: row iy is contiguous
  CHECK(g.array()(1, 2) == 5);
}

TEST_CASE("containsPoint covers the closed extent") {
  GridF g({0, 0}, 0.5, 4, 2);
  CHECK(g.containsPoint(0.0, 0.0));
  CHECK(g.containsPoint(2.0, 1.0));
  CHECK(!g.containsPoint(2.01, 0.5));
  CHECK(!g.containsPoint(-0.01, 0.5));
}

TEST_CASE("inBounds and fill") {
  GridU8 g({0, 0}, 1.0, 2, 2, 7);
  CHECK(g(1, 1) == 7);
  g.fill(3);
  CHECK(g(0, 1) == 3);
  CHECK(g.inBounds(0, 0));
  CHECK(!g.inBounds(2, 0));
  CHECK(!g.inBounds(0, -1));
}

TEST_CASE("sameLayout compares geometry not contents") {
  GridF a({0, 0}, 1.0, 2, 2, 0.0), b({0, 0}, 1.0, 2, 2, 5.0);
  GridF c({0, 0}, 0.5, 2, 2);
  CHECK(a.sameLayout(b));
  CHECK(!a.sameLayout(c));
}
