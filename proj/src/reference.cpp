#include "qcvx/reference.hpp"

#include <cmath>
#include <limits>

namespace qcvx::reference {

void maxplus_line(std::span<const double> xs, std::span<const double> a,
                  std::span<const double> ys, std::span<double> out,
                  std::span<std::int32_t> argmax) {
  for (std::size_t j = 0; j < ys.size(); ++j) {
    double best = -std::numeric_limits<double>::infinity();
    std::int32_t at = -1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isinf(a[i])) continue;
      const double v = xs[i] * ys[j] + a[i];
      if (at < 0 || v > best) {
        best = v;
        at = static_cast<std::int32_t>(i);
      }
    }
    out[j] = best;
    if (!argmax.empty()) argmax[j] = at;
  }
}

std::vector<double> conjugate(const GridFunction& f, const GridDomain& dual) {
  const auto& dom = f.domain();
  if (dual.dim() != dom.dim()) throw DomainError("conjugate: dual dimension mismatch");
  std::vector<double> g(dual.size());
  for (std::size_t j = 0; j < dual.size(); ++j) {
    const Point y = dual.node(j);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dom.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < dom.dim(); ++k) s += dom.coord(i, k) * y[k];
      best = std::max(best, s - f[i]);
    }
    g[j] = best;
  }
  return g;
}

std::size_t prox_index(const GridFunction& u, std::span<const double> y, double r) {
  const auto& dom = u.domain();
  std::size_t best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < dom.dim(); ++k) {
      const double d = dom.coord(i, k) - y[k];
      s += d * d;
    }
    const double v = r * u[i] + 0.5 * s;
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  return best_i;
}

std::vector<double> lower_hull_values(std::span<const double> xs, std::span<const double> vs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2], a = hull.back();
      const double cross = (xs[a] - xs[o]) * (vs[i] - vs[o]) - (vs[a] - vs[o]) * (xs[i] - xs[o]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && hull[seg + 1] < i) ++seg;
    const std::size_t l = hull[seg];
    if (l == i || seg + 1 == hull.size()) {
      out[i] = vs[i];
      continue;
    }
    const std::size_t r = hull[seg + 1];
    if (r == i) {
      out[i] = vs[i];
      continue;
    }
    const double t = (xs[i] - xs[l]) / (xs[r] - xs[l]);
    out[i] = vs[l] + t * (vs[r] - vs[l]);
  }
  return out;
}

}  // namespace qcvx::reference
