// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace sage {

/// Dense 2D metric grid of scalar cells. Cell (ix, iy) covers the square
/// [origin + ix*res, origin + (ix+1)*res) x [origin + iy*res, ...), so cell
/// centers sit at origin + (i + 0.5)*res. Data is stored row-major with iy as
/// the row index; the Eigen array is exposed for expression-style access.
template <typename Scalar>
class Grid {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Grid() = default;
  Grid(const Eigen::Vector2d& origin, double resolution, int width, int height,
       Scalar fill = Scalar{})
      : origin_(origin), resolution_(resolution), data_(Array::Constant(height, width, fill)) {
    assert(resolution > 0.0 && width > 0 && height > 0);
  }

  int width() const { return static_cast<int>(data_.cols()); }
  int height() const { return static_cast<int>(data_.rows()); }
  double resolution() const { return resolution_; }
  const Eigen::Vector2d& origin() const { return origin_; }

  Scalar& operator()(int ix, int iy) { return data_(iy, ix); }
  const Scalar& operator()(int ix, int iy) const { return data_(iy, ix); }

  Array& array() { return data_; }
  const Array& array() const { return data_; }

  bool inBounds(int ix, int iy) const {
    return ix >= 0 && ix < width() && iy >= 0 && iy < height();
  }

  /// True when (x, y) lies inside the metric extent covered by the cells.
  bool containsPoint(double x, double y) const {
    return x >= origin_.x() && y >= origin_.y() && x <= origin_.x() + width() * resolution_ &&
           y <= origin_.y() + height() * resolution_;
  }

  Eigen::Vector2i worldToCell(const Eigen::Vector2d& p) const {
    return {static_cast<int>(std::floor((p.x() - origin_.x()) / resolution_)),
            static_cast<int>(std::floor((p.y() - origin_.y()) / resolution_))};
  }

  Eigen::Vector2d cellCenter(int ix, int iy) const {
    return {origin_.x() + (ix + 0.5) * resolution_, origin_.y() + (iy + 0.5) * resolution_};
  }

  /// Continuous cell-index coordinates of a world point (cell centers land on
  /// integers), used by the interpolating samplers.
  Eigen::Vector2d worldToIndex(const Eigen::Vector2d& p) const {
    return {(p.x() - origin_.x()) / resolution_ - 0.5, (p.y() - origin_.y()) / resolution_ - 0.5};
  }

  void fill(Scalar v) { data_.setConstant(v); }

  bool sameLayout(const Grid& other) const {
    return width() == other.width() && height() == other.height() &&
           resolution_ == other.resolution_ && origin_ == other.origin_;
  }

 private:
  Eigen::Vector2d origin_{0.0, 0.0};
  double resolution_{1.0};
  Array data_;
};

using GridF = Grid<double>;
using GridU8 = Grid<std::uint8_t>;
using GridI32 = Grid<std::int32_t>;

/// Semantic class of a cell or tracked object.
enum class CellClass : std::uint8_t { Free = 0, StaticObstacle = 1, Human = 2 };

}  // namespace sage
