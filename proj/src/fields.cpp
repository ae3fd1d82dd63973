// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/fields.hpp>
#include <sage/grid_ops.hpp>
#include <sage/log.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sage {

bool FieldStack::containsPoint(double x, double y) const {
  return x >= origin.x() && y >= origin.y() && x < origin.x() + width * resolution &&
         y < origin.y() + height * resolution;
}

namespace {

// The checkerboard is stored as two row-major half grids padded with one
// ghost row/column on each side. Cells of one color only read the other
// color, so a color pass updates contiguous rows with unit stride. Row iy of
// color c starts at grid column pe = c ^ (iy & 1); cell k sits at
// ix = 2k + pe and its four neighbors live in the other half grid at columns
// k (north/south), k + pe - 1 (west) and k + pe (east).
struct SorPlan {
  int w = 0, h = 0, stride = 0;
  std::vector<double> val[2], msk[2], wrt[2];

  std::size_t at(int iy, int k) const {
    return static_cast<std::size_t>(iy + 1) * stride + k + 1;
  }
};

// Out-of-grid neighbors mirror the center cell, and each ghost entry is read
// only by the cell it mirrors, so refreshing ghosts from the active color
// before its pass reproduces the in-place mirror reads exactly.
void fill_ghosts(const double* cur, double* oth, int w, int h, int stride, int pe0) {
  std::copy(cur + stride, cur + 2 * stride, oth);
  std::copy(cur + static_cast<std::size_t>(h) * stride,
            cur + static_cast<std::size_t>(h + 1) * stride,
            oth + static_cast<std::size_t>(h + 1) * stride);
  for (int iy = 0; iy < h; ++iy) {
    const int pe = pe0 ^ (iy & 1);
    const int n = (w + 1 - pe) >> 1;
    double* orow = oth + static_cast<std::size_t>(iy + 1) * stride;
    const double* crow = cur + static_cast<std::size_t>(iy + 1) * stride;
    if (pe == 0) orow[0] = crow[1];
    if (2 * n + pe > w) orow[n + pe] = crow[n];
  }
}

template <bool HasRhs>
double color_pass(double* __restrict cur, const double* __restrict oth,
                  const double* __restrict msk, const double* __restrict wrt,
                  double* __restrict dub, int w, int h, int stride, int pe0, double omega) {
  const double qo = 0.25 * omega;
  double mx = 0.0;
  for (int iy = 0; iy < h; ++iy) {
    const int pe = pe0 ^ (iy & 1);
    const int n = (w + 1 - pe) >> 1;
    const std::size_t row = static_cast<std::size_t>(iy + 1) * stride;
    double* crow = cur + row + 1;
    const double* mrow = msk + row + 1;
    const double* wrow = HasRhs ? wrt + row + 1 : nullptr;
    const double* oup = oth + row - stride + 1;
    const double* odn = oth + row + stride + 1;
    const double* owest = oth + row + pe;
    const double* oeast = owest + 1;
    for (int k = 0; k < n; ++k) {
      const double c = crow[k];
      double du = qo * (oup[k] + odn[k] + owest[k] + oeast[k]) - omega * c;
      if constexpr (HasRhs) du -= wrow[k];
      du *= mrow[k];
      crow[k] = c + du;
      dub[k] = du;
    }
    double rowmx = 0.0;
    for (int k = 0; k < n; ++k) rowmx = std::max(rowmx, std::abs(dub[k]));
    mx = std::max(mx, rowmx);
  }
  return mx;
}

}  // namespace

SorResult sor_solve(GridF& u, const GridU8& interior, const GridF* rhs, double omega, double tol,
                    int max_iter) {
  const int w = u.width(), h = u.height();
  const double res2 = u.resolution() * u.resolution();
  double* ud = u.array().data();
  const std::uint8_t* m = interior.array().data();
  const double* f = rhs ? rhs->array().data() : nullptr;

  SorPlan p;
  p.w = w;
  p.h = h;
  p.stride = ((w + 1) >> 1) + 2;
  const std::size_t cells = static_cast<std::size_t>(p.stride) * (h + 2);
  const double wq = 0.25 * omega * res2;
  for (int c = 0; c < 2; ++c) {
    p.val[c].assign(cells, 0.0);
    p.msk[c].assign(cells, 0.0);
    if (f) p.wrt[c].assign(cells, 0.0);
  }
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const int c = (ix + iy) & 1;
      const int k = (ix - (c ^ (iy & 1))) >> 1;
      const std::size_t a = p.at(iy, k);
      const std::size_t gi = static_cast<std::size_t>(iy) * w + ix;
      p.val[c][a] = ud[gi];
      p.msk[c][a] = m[gi] ? 1.0 : 0.0;
      if (f) p.wrt[c][a] = wq * f[gi];
    }

  auto unpack = [&]() {
    for (int iy = 0; iy < h; ++iy)
      for (int ix = 0; ix < w; ++ix) {
        const int c = (ix + iy) & 1;
        const int k = (ix - (c ^ (iy & 1))) >> 1;
        ud[static_cast<std::size_t>(iy) * w + ix] = p.val[c][p.at(iy, k)];
      }
  };

  // Updates alone understate the error when the iteration contracts slowly,
  // so track the update decay rate over a trailing window and also require
  // the implied geometric tail max_du * q / (1 - q) to fall below tol.
  constexpr int kQWin = 8;
  double ring[kQWin] = {};
  std::vector<double> dub(static_cast<std::size_t>(p.stride), 0.0);
  double max_du = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    max_du = 0.0;
    for (int c = 0; c < 2; ++c) {
      double* cur = p.val[c].data();
      double* oth = p.val[1 - c].data();
      fill_ghosts(cur, oth, w, h, p.stride, c);
      const double mx =
          f ? color_pass<true>(cur, oth, p.msk[c].data(), p.wrt[c].data(), dub.data(), w, h,
                               p.stride, c, omega)
            : color_pass<false>(cur, oth, p.msk[c].data(), nullptr, dub.data(), w, h, p.stride,
                                c, omega);
      if (mx > max_du) max_du = mx;
    }
    bool done = max_du == 0.0;
    if (!done && iter > kQWin && max_du < tol) {
      const double q = std::pow(max_du / ring[iter % kQWin], 1.0 / kQWin);
      done = q < 1.0 && 2.0 * max_du * q / (1.0 - q) < tol;
    }
    if (done) {
      unpack();
      return {iter, max_du};
    }
    ring[iter % kQWin] = max_du;
  }
  unpack();
  throw SolverDiverged("sor_solve: no convergence after max_iter sweeps", max_du);
}

GridF class_flux(const Domain& dom, double b_human, double b_objects) {
  GridF out(dom.free.origin(), dom.free.resolution(), dom.free.width(), dom.free.height());
  for (int iy = 0; iy < out.height(); ++iy)
    for (int ix = 0; ix < out.width(); ++ix) {
      if (!dom.boundary(ix, iy)) continue;
      const bool hu = dom.infl_human(ix, iy) != 0;
      const bool st = dom.infl_static(ix, iy) != 0;
      out(ix, iy) = hu && st ? std::min(b_human, b_objects) : hu ? b_human : b_objects;
    }
  return out;
}

namespace {

bool layout_matches(const GridF& g, const GridU8& ref) {
  return g.width() == ref.width() && g.height() == ref.height() &&
         g.resolution() == ref.resolution() && g.origin() == ref.origin();
}

}  // namespace

GuidanceSlice solve_laplace(const Domain& dom, const BoundaryFrame& boundary_fr,
                            const BoundaryFrame& iface_fr, const GridF& flux,
                            const GridF& lambda, const FieldParams& fp,
                            const GuidanceSlice* warm) {
  GuidanceSlice out = warm && layout_matches(warm->vx, dom.free) ? *warm
                                                                  : GuidanceSlice(dom.free);
  GridU8 interior(dom.free.origin(), dom.free.resolution(), dom.free.width(),
                  dom.free.height());
  for (int iy = 0; iy < dom.free.height(); ++iy)
    for (int ix = 0; ix < dom.free.width(); ++ix) {
      if (dom.boundary(ix, iy)) {
        const double b = boundary_fr.valid(ix, iy) ? flux(ix, iy) : 0.0;
        out.vx(ix, iy) = b * boundary_fr.nx(ix, iy);
        out.vy(ix, iy) = b * boundary_fr.ny(ix, iy);
      } else if (dom.iface_pin(ix, iy)) {
        const double l = iface_fr.valid(ix, iy) ? lambda(ix, iy) : 0.0;
        out.vx(ix, iy) = l * iface_fr.tx(ix, iy);
        out.vy(ix, iy) = l * iface_fr.ty(ix, iy);
      } else if (!dom.free(ix, iy)) {
        out.vx(ix, iy) = 0.0;
        out.vy(ix, iy) = 0.0;
      } else {
        interior(ix, iy) = 1;
      }
    }

  sor_solve(out.vx, interior, nullptr, fp.sor_omega, fp.tol, fp.max_iter);
  sor_solve(out.vy, interior, nullptr, fp.sor_omega, fp.tol, fp.max_iter);
  return out;
}

GridF divergence(const GuidanceSlice& slice, const GridU8& free) {
  const int w = free.width(), h = free.height();
  const double res = free.resolution();
  GridF out(free.origin(), res, w, h);
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      if (!free(ix, iy)) continue;
      const int xm = std::max(0, ix - 1), xp = std::min(w - 1, ix + 1);
      const int ym = std::max(0, iy - 1), yp = std::min(h - 1, iy + 1);
      const double dvx = (slice.vx(xp, iy) - slice.vx(xm, iy)) / ((xp - xm) * res);
      const double dvy = (slice.vy(ix, yp) - slice.vy(ix, ym)) / ((yp - ym) * res);
      out(ix, iy) = dvx + dvy;
    }
  return out;
}

GridF forcing(const GridF& div, const GridU8& free, const FieldParams& fp) {
  GridF clamped(div.origin(), div.resolution(), div.width(), div.height());
  for (int iy = 0; iy < div.height(); ++iy)
    for (int ix = 0; ix < div.width(); ++ix)
      if (free(ix, iy))
        clamped(ix, iy) = std::min(fp.forcing_scale * div(ix, iy), -fp.c_min);
  return gaussian_smooth_masked(clamped, free, fp.sigma_forcing);
}

GridF solve_poisson(const Domain& dom, const GridF& f, const FieldParams& fp,
                    const GridF* warm) {
  GridF h = warm && layout_matches(*warm, dom.free)
                ? *warm
                : GridF(dom.free.origin(), dom.free.resolution(), dom.free.width(),
                        dom.free.height());
  for (int iy = 0; iy < h.height(); ++iy)
    for (int ix = 0; ix < h.width(); ++ix)
      if (!dom.free(ix, iy)) h(ix, iy) = 0.0;
  sor_solve(h, dom.free, &f, fp.sor_omega, fp.tol, fp.max_iter);
  return h;
}

SafetySlice finish_safety(const Domain& dom, const GridF& h, GridF f) {
  SafetySlice out(h);
  out.f = std::move(f);
  const int w = h.width(), hh = h.height();
  const double res = h.resolution();

  // Mean gradient magnitude over free cells touching the Dirichlet ring.
  static constexpr int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  double gsum = 0.0;
  int gcount = 0;
  for (int iy = 0; iy < hh; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      if (!dom.free(ix, iy)) continue;
      bool rim = false;
      for (const auto& o : off) {
        const int jx = ix + o[0], jy = iy + o[1];
        if (h.inBounds(jx, jy) && dom.boundary(jx, jy)) {
          rim = true;
          break;
        }
      }
      if (!rim) continue;
      const int xm = std::max(0, ix - 1), xp = std::min(w - 1, ix + 1);
      const int ym = std::max(0, iy - 1), yp = std::min(hh - 1, iy + 1);
      const double gx = (out.h(xp, iy) - out.h(xm, iy)) / ((xp - xm) * res);
      const double gy = (out.h(ix, yp) - out.h(ix, ym)) / ((yp - ym) * res);
      gsum += std::hypot(gx, gy);
      ++gcount;
    }
  const double gbar = gcount > 0 ? gsum / gcount : 0.0;

  if (gcount > 0) {
    const GridF d2b = edt_squared(dom.boundary);
    for (int iy = 0; iy < hh; ++iy)
      for (int ix = 0; ix < w; ++ix) {
        if (dom.free(ix, iy) || dom.boundary(ix, iy)) continue;
        out.h(ix, iy) = -res * std::sqrt(d2b(ix, iy)) * gbar;
      }
  }

  for (int iy = 0; iy < hh; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const int xm = std::max(0, ix - 1), xp = std::min(w - 1, ix + 1);
      const int ym = std::max(0, iy - 1), yp = std::min(hh - 1, iy + 1);
      out.gx(ix, iy) = (out.h(xp, iy) - out.h(xm, iy)) / ((xp - xm) * res);
      out.gy(ix, iy) = (out.h(ix, yp) - out.h(ix, ym)) / ((yp - ym) * res);
    }
  return out;
}

YawDerivative yaw_derivative(const std::vector<GridF>& h_slices) {
  YawDerivative out;
  const int n = static_cast<int>(h_slices.size());
  out.dpsi.reserve(h_slices.size());
  if (n < 3) {
    out.degenerate = true;
    if (n > 0)
      log::warn("yaw_derivative: %d slice(s), returning zero derivative", n);
    for (const auto& h : h_slices)
      out.dpsi.emplace_back(h.origin(), h.resolution(), h.width(), h.height());
    return out;
  }
  const double dpsi = 2.0 * M_PI / n;
  for (int l = 0; l < n; ++l) {
    const GridF& up = h_slices[static_cast<std::size_t>((l + 1) % n)];
    const GridF& dn = h_slices[static_cast<std::size_t>((l + n - 1) % n)];
    GridF d(up.origin(), up.resolution(), up.width(), up.height());
    d.array() = (up.array() - dn.array()) / (2.0 * dpsi);
    out.dpsi.push_back(std::move(d));
  }
  return out;
}

namespace {

Sample sample_impl(const FieldStack& st, double x, double y, double psi, bool clamp) {
  if (st.open) {
    Sample s;
    s.h = std::numeric_limits<double>::infinity();
    return s;
  }
  if (!st.containsPoint(x, y)) {
    if (!clamp)
      throw OutOfBounds("field sample outside grid extent");
    x = std::clamp(x, st.origin.x(), st.origin.x() + st.width * st.resolution);
    y = std::clamp(y, st.origin.y(), st.origin.y() + st.height * st.resolution);
  }
  const double jx = (x - st.origin.x()) / st.resolution - 0.5;
  const double jy = (y - st.origin.y()) / st.resolution - 0.5;

  const int n = st.n_psi;
  double t = psi / (2.0 * M_PI / n);
  t = std::fmod(t, static_cast<double>(n));
  if (t < 0.0) t += n;
  int l0 = static_cast<int>(std::floor(t));
  double fr = t - l0;
  if (fr < 1e-9) fr = 0.0;
  if (fr > 1.0 - 1e-9) {
    fr = 0.0;
    ++l0;
  }
  l0 %= n;
  const int l1 = (l0 + 1) % n;

  auto lerp = [fr](double a, double b) { return a + fr * (b - a); };
  auto bil = [jx, jy](const GridF& g) { return bilinear_at_index(g, jx, jy); };

  Sample s;
  s.h = lerp(bil(st.s[l0].h), bil(st.s[l1].h));
  s.grad.x() = lerp(bil(st.s[l0].gx), bil(st.s[l1].gx));
  s.grad.y() = lerp(bil(st.s[l0].gy), bil(st.s[l1].gy));
  s.v.x() = lerp(bil(st.v[l0].vx), bil(st.v[l1].vx));
  s.v.y() = lerp(bil(st.v[l0].vy), bil(st.v[l1].vy));
  s.dh_dpsi = lerp(bil(st.dpsi[l0]), bil(st.dpsi[l1]));
  s.dh_dt = lerp(bil(st.dhdt[l0]), bil(st.dhdt[l1]));
  return s;
}

}  // namespace

Sample sample(const FieldStack& stack, double x, double y, double psi) {
  return sample_impl(stack, x, y, psi, false);
}

Sample sample_clamped(const FieldStack& stack, double x, double y, double psi) {
  return sample_impl(stack, x, y, psi, true);
}

FieldStack FieldSynthesizer::synthesize(const SemanticGrid& grid, double now) {
  const GridU8& cls = grid.cell_class;
  FieldStack stack;
  stack.origin = cls.origin();
  stack.resolution = cls.resolution();
  stack.width = cls.width();
  stack.height = cls.height();
  stack.n_psi = params_.geometry.n_psi;
  stack.stamp = now;

  const bool any_occupied =
      (cls.array() != static_cast<std::uint8_t>(CellClass::Free)).any();
  if (!any_occupied) {
    stack.open = true;
    prev_.reset();
    temporal_ = TemporalState{};
    return stack;
  }

  const GeometryParams& g = params_.geometry;
  const FieldParams& fp = params_.fields;
  const PassSide side = pass_side_from_string(g.pass_side);
  const int n = g.n_psi;
  const int distinct = n % 2 == 0 ? n / 2 : n;

  const bool warm_ok = prev_ && !prev_->open && prev_->n_psi == n &&
                       prev_->width == stack.width && prev_->height == stack.height &&
                       prev_->origin == stack.origin;

  GridF lambda(cls.origin(), cls.resolution(), cls.width(), cls.height(),
               fp.lambda_tangent);

  std::vector<GridF> h_list;
  h_list.reserve(static_cast<std::size_t>(n));
  stack.v.reserve(static_cast<std::size_t>(n));
  stack.s.reserve(static_cast<std::size_t>(n));
  stack.free.reserve(static_cast<std::size_t>(n));
  stack.h_max = 0.0;
  stack.max_grad = 0.0;

  for (int d = 0; d < distinct; ++d) {
    Domain dom = build_domain(cls, g, fp.tangent_classes, fp.lambda_tangent, d);
    const BoundaryFrame bfr = boundary_frames(dom.free, g.sigma_normal, side);
    const bool any_pin = (dom.iface_pin.array() != 0).any();
    const BoundaryFrame ifr =
        any_pin ? boundary_frames(dom.buffered, g.sigma_normal, side) : bfr;
    const GridF flux = class_flux(dom, fp.b_human, fp.b_objects);

    const GuidanceSlice* warm_v = warm_ok ? &prev_->v[static_cast<std::size_t>(d)] : nullptr;
    const GridF* warm_h = warm_ok ? &prev_->s[static_cast<std::size_t>(d)].h : nullptr;

    GuidanceSlice v = solve_laplace(dom, bfr, ifr, flux, lambda, fp, warm_v);
    const GridF div = divergence(v, dom.free);
    GridF f = forcing(div, dom.free, fp);
    GridF h = solve_poisson(dom, f, fp, warm_h);
    SafetySlice ss = finish_safety(dom, h, std::move(f));

    for (int iy = 0; iy < cls.height(); ++iy)
      for (int ix = 0; ix < cls.width(); ++ix)
        if (dom.free(ix, iy)) {
          stack.h_max = std::max(stack.h_max, ss.h(ix, iy));
          const double gm = std::hypot(ss.gx(ix, iy), ss.gy(ix, iy));
          stack.max_grad = std::max(stack.max_grad, gm);
        }

    h_list.push_back(ss.h);
    stack.v.push_back(std::move(v));
    stack.s.push_back(std::move(ss));
    stack.free.push_back(std::move(dom.free));
  }
  for (int l = distinct; l < n; ++l) {
    stack.v.push_back(stack.v[static_cast<std::size_t>(l - distinct)]);
    stack.s.push_back(stack.s[static_cast<std::size_t>(l - distinct)]);
    stack.free.push_back(stack.free[static_cast<std::size_t>(l - distinct)]);
    h_list.push_back(h_list[static_cast<std::size_t>(l - distinct)]);
  }

  stack.dpsi = yaw_derivative(h_list).dpsi;
  temporal_ = update_dhdt(std::move(temporal_), h_list, now, params_.temporal.beta);
  stack.dhdt = temporal_.dhdt;

  prev_ = stack;
  return stack;
}

}  // namespace sage
