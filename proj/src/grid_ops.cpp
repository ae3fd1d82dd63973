// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/grid_ops.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace sage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform over a sampled function f (lower envelope of
// parabolas rooted at (i, f[i])).
void dt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[k]] == kInf) {
      v[k] = q;
      continue;
    }
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (k > 0 && s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    if (f[v[0]] == kInf) {
      d[q] = kInf;
      continue;
    }
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (double)(q - v[k]) + f[v[k]];
  }
}

}  // namespace

GridF edt_squared(const GridU8& seed) {
  const int W = seed.width(), H = seed.height();
  GridF out(seed.origin(), seed.resolution(), W, H, 0.0);
  const int n = std::max(W, H);
  std::vector<double> z(n + 1);
  std::vector<int> v(n);

  // columns first
  GridF tmp(seed.origin(), seed.resolution(), W, H, 0.0);
  std::vector<double> fc(H), dc(H);
  for (int ix = 0; ix < W; ++ix) {
    for (int iy = 0; iy < H; ++iy) fc[iy] = seed(ix, iy) ? 0.0 : kInf;
    dt1d(fc, dc, v, z);
    for (int iy = 0; iy < H; ++iy) tmp(ix, iy) = dc[iy];
  }
  // then rows
  std::vector<double> fr(W), dr(W);
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) fr[ix] = tmp(ix, iy);
    dt1d(fr, dr, v, z);
    for (int ix = 0; ix < W; ++ix) out(ix, iy) = dr[ix];
  }
  return out;
}

GridF edt_distance(const GridU8& seed) {
  GridF sq = edt_squared(seed);
  sq.array() = sq.array().sqrt() * seed.resolution();
  return sq;
}

GridF gaussian_smooth_masked(const GridF& in, const GridU8& mask, double sigma) {
  GridF out = in;
  if (sigma <= 0.0) return out;
  const double sc = sigma / in.resolution();  // sigma in cells
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sc)));
  std::vector<double> w(2 * r + 1);
  for (int k = -r; k <= r; ++k) w[k + r] = std::exp(-0.5 * (k * k) / (sc * sc));

  const int W = in.width(), H = in.height();
  // Non-separable masked blur: the mask breaks separability, and kernel
  // supports here are small.
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      if (!mask(ix, iy)) continue;
      double acc = 0.0, wsum = 0.0;
      const int x0 = std::max(0, ix - r), x1 = std::min(W - 1, ix + r);
      const int y0 = std::max(0, iy - r), y1 = std::min(H - 1, iy + r);
      for (int jy = y0; jy <= y1; ++jy) {
        const double wy = w[jy - iy + r];
        for (int jx = x0; jx <= x1; ++jx) {
          if (!mask(jx, jy)) continue;
          const double wk = w[jx - ix + r] * wy;
          acc += wk * in(jx, jy);
          wsum += wk;
        }
      }
      if (wsum > 0.0) out(ix, iy) = acc / wsum;
    }
  }
  return out;
}

std::pair<GridI32, int> connected_components(const GridU8& occupied) {
  const int W = occupied.width(), H = occupied.height();
  GridI32 labels(occupied.origin(), occupied.resolution(), W, H, -1);
  int next = 0;
  std::vector<Eigen::Vector2i> stack;
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      if (!occupied(ix, iy) || labels(ix, iy) >= 0) continue;
      stack.push_back({ix, iy});
      labels(ix, iy) = next;
      while (!stack.empty()) {
        const Eigen::Vector2i c = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = c.x() + dx, ny = c.y() + dy;
            if ((dx == 0 && dy == 0) || !occupied.inBounds(nx, ny)) continue;
            if (occupied(nx, ny) && labels(nx, ny) < 0) {
              labels(nx, ny) = next;
              stack.push_back({nx, ny});
            }
          }
        }
      }
      ++next;
    }
  }
  return {std::move(labels), next};
}

double bilinear_at_index(const GridF& g, double jx, double jy) {
  const int W = g.width(), H = g.height();
  double cx = std::clamp(jx, 0.0, static_cast<double>(W - 1));
  double cy = std::clamp(jy, 0.0, static_cast<double>(H - 1));
  int ix = std::min(static_cast<int>(std::floor(cx)), W - 2 >= 0 ? W - 2 : 0);
  int iy = std::min(static_cast<int>(std::floor(cy)), H - 2 >= 0 ? H - 2 : 0);
  ix = std::max(ix, 0);
  iy = std::max(iy, 0);
  double tx = std::clamp(cx - ix, 0.0, 1.0);
  double ty = std::clamp(cy - iy, 0.0, 1.0);
  // Node queries reproduce stored values exactly.
  if (tx < 1e-9) tx = 0.0;
  if (tx > 1.0 - 1e-9) tx = 1.0;
  if (ty < 1e-9) ty = 0.0;
  if (ty > 1.0 - 1e-9) ty = 1.0;
  const int ix1 = std::min(ix + 1, W - 1), iy1 = std::min(iy + 1, H - 1);
  const double a = g(ix, iy) * (1.0 - tx) + g(ix1, iy) * tx;
  const double b = g(ix, iy1) * (1.0 - tx) + g(ix1, iy1) * tx;
  return a * (1.0 - ty) + b * ty;
}

GridI32 nearest_seed_labels(const GridU8& seed, const GridI32& seed_ids) {
  const int W = seed.width(), H = seed.height();
  GridI32 out(seed.origin(), seed.resolution(), W, H, -1);
  std::deque<Eigen::Vector2i> queue;
  for (int iy = 0; iy < H; ++iy)
    for (int ix = 0; ix < W; ++ix)
      if (seed(ix, iy)) {
        out(ix, iy) = seed_ids(ix, iy);
        queue.push_back({ix, iy});
      }
  while (!queue.empty()) {
    const Eigen::Vector2i c = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = c.x() + dx, ny = c.y() + dy;
        if ((dx == 0 && dy == 0) || !out.inBounds(nx, ny)) continue;
        if (out(nx, ny) < 0) {
          out(nx, ny) = out(c.x(), c.y());
          queue.push_back({nx, ny});
        }
      }
    }
  }
  return out;
}

}  // namespace sage
