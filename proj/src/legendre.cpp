#include "qcvx/legendre.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace qcvx::legendre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One sweep along `axis`: in has shape `shape`, axis positions x0 + i*hx;
// out gets shape with axis length m, positions y0 + j*hy.
std::vector<double> sweep(const std::vector<double>& in, const std::vector<std::size_t>& shape,
                          std::size_t axis, double x0, double hx, std::size_t m, double y0,
                          double hy, std::vector<std::int32_t>* argmax) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t k = 0; k < axis; ++k) outer *= shape[k];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  const std::size_t n = shape[axis];
  std::vector<double> out(outer * m * inner);
  if (argmax) argmax->assign(out.size(), -1);
  const std::size_t lines = outer * inner;

#pragma omp parallel
  {
    std::vector<double> a(n), b(m);
    std::vector<std::int32_t> am(argmax ? m : 0);
#pragma omp for schedule(static)
    for (std::size_t line = 0; line < lines; ++line) {
      const std::size_t o = line / inner, i = line % inner;
      for (std::size_t t = 0; t < n; ++t) a[t] = in[(o * n + t) * inner + i];
      maxplus_line(x0, hx, a, y0, hy, b, am);
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t dst = (o * m + j) * inner + i;
        out[dst] = b[j];
        if (argmax) (*argmax)[dst] = am[j];
      }
    }
  }
  return out;
}

}  // namespace

void maxplus_line(double x0, double hx, std::span<const double> a, double y0, double hy,
                  std::span<double> out, std::span<std::int32_t> argmax) {
  // Upper hull of (x_i, a_i) over finite entries; collinear middles are dropped
  // so each hull run starts at its smallest index.
  thread_local std::vector<std::int32_t> hull;
  hull.clear();
  const auto xi = [&](std::int32_t i) { return x0 + static_cast<double>(i) * hx; };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isinf(a[i])) continue;
    const auto p = static_cast<std::int32_t>(i);
    while (hull.size() >= 2) {
      const std::int32_t o = hull[hull.size() - 2], q = hull.back();
      const double cross = (xi(q) - xi(o)) * (a[i] - a[o]) - (a[q] - a[o]) * (xi(p) - xi(o));
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  if (hull.empty()) {
    std::fill(out.begin(), out.end(), -kInf);
    std::fill(argmax.begin(), argmax.end(), -1);
    return;
  }
  std::size_t k = 0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double y = y0 + static_cast<double>(j) * hy;
    double cur = xi(hull[k]) * y + a[hull[k]];
    while (k + 1 < hull.size()) {
      const double next = xi(hull[k + 1]) * y + a[hull[k + 1]];
      if (!(next > cur)) break;
      cur = next;
      ++k;
    }
    out[j] = cur;
    if (!argmax.empty()) argmax[j] = hull[k];
  }
}

std::vector<double> conjugate_values(const GridDomain& primal, std::span<const double> f,
                                     const GridDomain& dual, SweepArgmax* argmax) {
  if (dual.dim() != primal.dim()) throw DomainError("conjugate: dual dimension mismatch");
  if (f.size() != primal.size()) throw DomainError("conjugate: value count mismatch");
  std::vector<double> cur(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) cur[i] = -f[i];
  std::vector<std::size_t> shape = primal.shape();
  if (argmax) argmax->assign(primal.dim(), {});
  for (std::size_t k = 0; k < primal.dim(); ++k) {
    cur = sweep(cur, shape, k, primal.mins()[k], primal.spacing(k), dual.shape()[k],
                dual.mins()[k], dual.spacing(k), argmax ? &(*argmax)[k] : nullptr);
    shape[k] = dual.shape()[k];
  }
  return cur;
}

std::vector<std::size_t> backtrace(const GridDomain& primal, const GridDomain& dual,
                                   const SweepArgmax& argmax) {
  const std::size_t n = primal.dim();
  std::vector<std::size_t> result(dual.size());
#pragma omp parallel
  {
    std::vector<std::size_t> m(n), shape(n);
#pragma omp for schedule(static)
    for (std::size_t o = 0; o < dual.size(); ++o) {
      m = dual.unravel(o);
      bool ok = true;
      for (std::size_t k = n; k-- > 0;) {
        for (std::size_t a = 0; a < n; ++a) shape[a] = a <= k ? dual.shape()[a] : primal.shape()[a];
        std::size_t lin = 0;
        for (std::size_t a = 0; a < n; ++a) lin = lin * shape[a] + m[a];
        const std::int32_t t = argmax[k][lin];
        if (t < 0) {
          ok = false;
          break;
        }
        m[k] = static_cast<std::size_t>(t);
      }
      result[o] = ok ? primal.ravel(m) : std::numeric_limits<std::size_t>::max();
    }
  }
  return result;
}

GridFunction conjugate(const GridFunction& f, const DualGrid& dual) {
  if (dual.grid.size() == 0) throw DomainError("conjugate: empty dual grid");
  return GridFunction(dual.grid, conjugate_values(f.domain(), f.values(), dual.grid));
}

DualGrid auto_dual(const GridDomain& primal, std::span<const double> f, const std::vector<char>& mask) {
  const std::size_t n = primal.dim();
  const double cap = n == 1 ? 16.0 : (n == 2 ? 4.0 : 2.0);
  constexpr double kLineBudget = 1 << 20;
  // Total dual nodes allowed in n-D before the per-axis multiple of N takes over.
  const double axis_budget = n == 1 ? kLineBudget : std::floor(std::pow(double(1 << 22), 1.0 / double(n)));
  std::vector<double> mins(n), maxs(n);
  std::vector<std::size_t> shape(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t st = primal.stride(k), len = primal.shape()[k];
    const double h = primal.spacing(k);
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < primal.size(); ++i) {
      if (primal.index_along(i, k) + 1 >= len || !mask[i] || !mask[i + st]) continue;
      const double s = (f[i + st] - f[i]) / h;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const bool any = lo <= hi;
    const double range = any ? hi - lo : 0.0;
    const double noise = 1e-10 * (1.0 + (any ? std::max(std::abs(lo), std::abs(hi)) : 0.0));

    // Smallest slope jump the dual spacing must resolve. In 1-D only vertices
    // of the lower hull matter; in n-D consecutive slopes along each line are
    // used and the spacing is halved, since cells of a convex function need
    // not be axis aligned.
    double jump = kInf;
    if (n == 1) {
      std::vector<std::size_t> hull;
      for (std::size_t i = 0; i < len; ++i) {
        if (!mask[i]) continue;
        while (hull.size() >= 2) {
          const std::size_t a = hull[hull.size() - 2], b = hull.back();
          const double s1 = (f[b] - f[a]) / (primal.coord(b, 0) - primal.coord(a, 0));
          const double s2 = (f[i] - f[b]) / (primal.coord(i, 0) - primal.coord(b, 0));
          if (s2 <= s1) hull.pop_back();
          else break;
        }
        hull.push_back(i);
      }
      for (std::size_t t = 0; t + 2 < hull.size(); ++t) {
        const double s1 = (f[hull[t + 1]] - f[hull[t]]) / (primal.coord(hull[t + 1], 0) - primal.coord(hull[t], 0));
        const double s2 =
            (f[hull[t + 2]] - f[hull[t + 1]]) / (primal.coord(hull[t + 2], 0) - primal.coord(hull[t + 1], 0));
        if (s2 - s1 > noise) jump = std::min(jump, s2 - s1);
      }
    } else {
      for (std::size_t i = 0; i < primal.size(); ++i) {
        if (primal.index_along(i, k) + 2 >= len) continue;
        if (!mask[i] || !mask[i + st] || !mask[i + 2 * st]) continue;
        const double d = ((f[i + 2 * st] - f[i + st]) - (f[i + st] - f[i])) / h;
        if (std::abs(d) > noise) jump = std::min(jump, 0.5 * std::abs(d));
      }
    }

    std::size_t m = std::max<std::size_t>(len, 5);
    if (range > noise) {
      if (std::isfinite(jump)) {
        const double need = std::ceil(range / jump) + 3.0;
        double limit = cap * static_cast<double>(len);
        limit = std::max(limit, axis_budget);
        m = std::max(m, static_cast<std::size_t>(std::min(need, limit)));
      }
      if (m % 2 == 0) ++m;
      const double d = range / static_cast<double>(m - 3);
      mins[k] = lo - d;
      maxs[k] = hi + d;
    } else {
      if (m % 2 == 0) ++m;
      const double c = any ? 0.5 * (lo + hi) : 0.0;
      mins[k] = c - 1.0;
      maxs[k] = c + 1.0;
    }
    shape[k] = m;
  }
  return DualGrid{GridDomain(mins, maxs, shape)};
}

DualGrid auto_dual(const GridFunction& f) {
  return auto_dual(f.domain(), f.values(), std::vector<char>(f.size(), 1));
}

namespace {

using Poly = std::vector<std::array<double, 2>>;

// Keeps the part of a convex polygon with <a, y> <= b.
Poly clip(const Poly& poly, double a0, double a1, double b) {
  Poly out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % m];
    const double fp = a0 * p[0] + a1 * p[1] - b, fq = a0 * q[0] + a1 * q[1] - b;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  return out;
}

// A slope y with f(z) >= f(x) + <y, z - x> - slack for every masked z, by
// clipping a large box with one half-plane per node. Neighbours go first so
// unsupported nodes usually fail after a handful of cuts.
std::optional<Point> exact_support_2d(const GridDomain& g, std::span<const double> f, const std::vector<char>& mask,
                                      std::size_t x, const GridDomain& dual, double slack) {
  const double x0 = g.coord(x, 0), x1 = g.coord(x, 1);
  double w = 1.0;
  for (std::size_t k = 0; k < 2; ++k) w = std::max({w, std::abs(dual.mins()[k]), std::abs(dual.maxs()[k])});
  w *= 1e3;
  Poly poly{{-w, -w}, {w, -w}, {w, w}, {-w, w}};
  const auto cut = [&](std::size_t z) {
    if (z == x || !mask[z]) return;
    poly = clip(poly, g.coord(z, 0) - x0, g.coord(z, 1) - x1, f[z] - f[x] + slack);
  };
  const std::size_t r = g.index_along(x, 0), c = g.index_along(x, 1);
  for (std::size_t i = r > 0 ? r - 1 : 0; i <= std::min(r + 1, g.shape()[0] - 1) && !poly.empty(); ++i)
    for (std::size_t j = c > 0 ? c - 1 : 0; j <= std::min(c + 1, g.shape()[1] - 1); ++j) cut(i * g.stride(0) + j);
  for (std::size_t z = 0; z < g.size() && !poly.empty(); ++z) cut(z);
  if (poly.empty()) return std::nullopt;
  Point y{0.0, 0.0};
  for (const auto& p : poly) {
    y[0] += p[0] / static_cast<double>(poly.size());
    y[1] += p[1] / static_cast<double>(poly.size());
  }
  return y;
}

}  // namespace

Envelope envelope_on(const GridDomain& primal, std::span<const double> f, const std::vector<char>& mask) {
  bool any = false;
  std::vector<double> masked(f.begin(), f.end());
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (mask[i]) any = true;
    else masked[i] = kInf;
  }
  if (!any) throw DomainError("envelope: empty region");
  DualGrid dual = auto_dual(primal, f, mask);
  SweepArgmax first;
  const std::vector<double> g = conjugate_values(primal, masked, dual.grid, primal.dim() == 1 ? &first : nullptr);
  SweepArgmax am;
  Envelope env{dual, conjugate_values(dual.grid, g, primal, &am), {}, {}};
  env.support = backtrace(dual.grid, primal, am);

  if (primal.dim() == 1) {
    // The maximizers of the first transform are the hull vertices the dual grid
    // resolves. Between them f** is affine, but an edge has a single slope that
    // a uniform dual grid generally misses, so fill edges by interpolation.
    std::vector<std::size_t> verts;
    for (auto i : first[0])
      if (i >= 0) verts.push_back(static_cast<std::size_t>(i));
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    for (std::size_t t = 0; t < verts.size(); ++t) {
      const std::size_t a = verts[t];
      env.values[a] = f[a];
      if (t + 1 == verts.size()) break;
      const std::size_t b = verts[t + 1];
      const double xa = primal.coord(a, 0), xb = primal.coord(b, 0);
      for (std::size_t i = a + 1; i < b; ++i) {
        const double w = (primal.coord(i, 0) - xa) / (xb - xa);
        env.values[i] = (1.0 - w) * f[a] + w * f[b];
      }
    }
  } else if (primal.dim() == 2) {
    // A kink of the data can have a thin set of supporting slopes that misses
    // every dual node; settle the nodes left below f exactly.
    double fmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (mask[i]) fmax = std::max(fmax, std::abs(f[i]));
    const double slack = 1e-12 * (1.0 + fmax);
    env.exact.assign(f.size(), Point{});
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!mask[i] || f[i] - env.values[i] <= slack) continue;
      if (auto y = exact_support_2d(primal, f, mask, i, dual.grid, slack)) {
        env.values[i] = f[i];
        env.exact[i] = std::move(*y);
      }
    }
  }
  return env;
}

Envelope envelope_on(const GridFunction& f, const IndexRegion& region) {
  return envelope_on(f.domain(), f.values(), region.mask());
}

GridFunction biconjugate_envelope(const GridFunction& f) {
  auto env = envelope_on(f.domain(), f.values(), std::vector<char>(f.size(), 1));
  return GridFunction(f.domain(), std::move(env.values));
}

double fenchel_gap(const GridFunction& f, const GridFunction& g, std::span<const double> x,
                   std::span<const double> y) {
  const auto xi = f.domain().find_node(x);
  const auto yi = g.domain().find_node(y);
  if (!xi || !yi) throw DomainError("fenchel_gap: points must be grid nodes");
  return f[*xi] + g[*yi] - dot(x, y);
}

}  // namespace qcvx::legendre
