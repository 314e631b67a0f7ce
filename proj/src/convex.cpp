#include "qcvx/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qcvx::convex {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConvexityViolation::ConvexityViolation(std::size_t l, std::size_t m, std::size_t r)
    : DomainError("not convex: chords through nodes " + std::to_string(l) + ", " + std::to_string(m) +
                  ", " + std::to_string(r) + " cross"),
      left(l), x(m), right(r) {}

double QuadraticPolynomial::value(std::span<const double> y) const {
  return c + dot(q, y) + 0.5 * P.quad_form(y);
}

Point QuadraticPolynomial::gradient(std::span<const double> y) const {
  Point g = P.apply(y);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] += q[k];
  return g;
}

double convexity_defect(const GridFunction& f) {
  const GridFunction env = legendre::biconjugate_envelope(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - env[i]));
  return worst / (1.0 + f.sup_norm());
}

bool is_convex(const GridFunction& f, double tol) { return convexity_defect(f) <= tol; }

bool is_convex_on(const GridFunction& f, const IndexRegion& region, double tol) {
  if (region.empty()) return true;
  const auto env = legendre::envelope_on(f, region);
  double worst = 0.0, sup = 0.0;
  for (auto i : region.members()) {
    worst = std::max(worst, std::abs(f[i] - env.values[i]));
    sup = std::max(sup, std::abs(f[i]));
  }
  return worst <= tol * (1.0 + sup);
}

std::optional<double> quasiconvex_modulus(const GridFunction& u, double lambda_max, double tol) {
  if (!(lambda_max > 0.0)) throw DomainError("quasiconvex_modulus: lambda_max must be positive");
  if (!(tol > 0.0)) throw DomainError("quasiconvex_modulus: tol must be positive");
  const Point origin(u.domain().dim(), 0.0);
  const auto convex_at = [&](double lambda) {
    return is_convex(add_isotropic_quadratic(u, lambda, origin), 1e-9);
  };
  if (convex_at(0.0)) return 0.0;
  if (!convex_at(lambda_max)) return std::nullopt;
  double lo = 0.0, hi = lambda_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (convex_at(mid) ? hi : lo) = mid;
  }
  return hi;
}

bool subdifferential_contains(const GridFunction& u, std::size_t x, std::span<const double> p, double tol) {
  return subdifferential_contains_on(u, full_region(u.domain()), x, p, tol);
}

bool subdifferential_contains_on(const GridFunction& u, const IndexRegion& region, std::size_t x,
                                 std::span<const double> p, double tol) {
  const auto& dom = u.domain();
  if (x >= dom.size()) throw DomainError("subdifferential_contains: node out of range");
  if (p.size() != dom.dim()) throw DomainError("subdifferential_contains: slope dimension mismatch");
  const double slack = tol * (1.0 + u.sup_norm());
  const Point xc = dom.node(x);
  bool ok = true;
#pragma omp parallel
  {
    Point y(dom.dim());
#pragma omp for schedule(static) reduction(&& : ok)
    for (std::size_t t = 0; t < region.size(); ++t) {
      const std::size_t j = region.members()[t];
      dom.node_into(j, y);
      double s = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) s += p[k] * (y[k] - xc[k]);
      ok = ok && (u[x] + s <= u[j] + slack);
    }
  }
  return ok;
}

SubdiffInterval chord_bounds_1d(const GridDomain& domain, std::span<const double> f,
                                const std::vector<char>& mask, std::size_t x) {
  SubdiffInterval b{-kInf, kInf};
  const double xc = domain.coord(x, 0);
  for (std::size_t y = 0; y < x; ++y)
    if (mask[y]) b.lower = std::max(b.lower, (f[x] - f[y]) / (xc - domain.coord(y, 0)));
  for (std::size_t y = x + 1; y < domain.size(); ++y)
    if (mask[y]) b.upper = std::min(b.upper, (f[y] - f[x]) / (domain.coord(y, 0) - xc));
  return b;
}

SubdiffInterval subdifferential_interval_1d(const GridFunction& u, std::size_t x) {
  const auto& dom = u.domain();
  if (dom.dim() != 1) throw DomainError("subdifferential_interval_1d: one dimension only");
  if (x == 0 || x + 1 >= dom.size()) throw DomainError("subdifferential_interval_1d: node must be interior");
  const double xc = dom.coord(x, 0);
  SubdiffInterval b{-kInf, kInf};
  std::size_t arg_l = 0, arg_r = x + 1;
  for (std::size_t y = 0; y < x; ++y) {
    const double s = (u[x] - u[y]) / (xc - dom.coord(y, 0));
    if (s > b.lower) b.lower = s, arg_l = y;
  }
  for (std::size_t y = x + 1; y < dom.size(); ++y) {
    const double s = (u[y] - u[x]) / (dom.coord(y, 0) - xc);
    if (s < b.upper) b.upper = s, arg_r = y;
  }
  // Rounding can leave an exact kink a few ulps inverted.
  const double slack = 1e-12 * (1.0 + std::abs(b.lower) + std::abs(b.upper));
  if (b.lower > b.upper + slack) throw ConvexityViolation(arg_l, x, arg_r);
  if (b.lower > b.upper) b.lower = b.upper = 0.5 * (b.lower + b.upper);
  return b;
}

std::optional<Point> subgradient_witness(const GridFunction& u, std::size_t x, const legendre::DualGrid& dual) {
  return subgradient_witness(u, legendre::conjugate(u, dual), x);
}

std::optional<Point> subgradient_witness(const GridFunction& u, const GridFunction& g, std::size_t x) {
  const auto& dual = g.domain();
  if (dual.dim() != u.domain().dim()) throw DomainError("subgradient_witness: dimension mismatch");
  const Point xc = u.domain().node(x);
  Point y(dual.dim());
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < dual.size(); ++j) {
    dual.node_into(j, y);
    const double gap = u[x] + g[j] - dot(xc, y);
    if (gap < best) best = gap, arg = j;
  }
  if (best > 1e-6 * (1.0 + u.sup_norm())) return std::nullopt;
  return dual.node(arg);
}

double lipschitz_constant(const GridFunction& u, const IndexRegion& region) {
  if (region.empty()) throw DomainError("lipschitz_constant: empty region");
  const auto& dom = u.domain();
  double C = 0.0;
  for (auto i : region.members()) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < dom.dim(); ++k) {
      const std::size_t at = dom.index_along(i, k), st = dom.stride(k);
      double m = 0.0;
      if (at > 0) m = std::max(m, std::abs(u[i] - u[i - st]) / dom.spacing(k));
      if (at + 1 < dom.shape()[k]) m = std::max(m, std::abs(u[i + st] - u[i]) / dom.spacing(k));
      s2 += m * m;
    }
    C = std::max(C, std::sqrt(s2));
  }
  return C;
}

double lipschitz_defect(const GridFunction& u, const IndexRegion& region, double C) {
  const auto& dom = u.domain();
  const auto& m = region.members();
  double worst = -kInf;
#pragma omp parallel
  {
    Point a(dom.dim()), b(dom.dim());
#pragma omp for schedule(dynamic, 16) reduction(max : worst)
    for (std::size_t s = 0; s < m.size(); ++s) {
      dom.node_into(m[s], a);
      for (std::size_t t = s + 1; t < m.size(); ++t) {
        dom.node_into(m[t], b);
        worst = std::max(worst, std::abs(u[m[t]] - u[m[s]]) - C * distance(a, b));
      }
    }
  }
  return m.size() < 2 ? 0.0 : worst;
}

double monotonicity_defect(const GridFunction& u, const std::vector<SubgradientPair>& pairs, double tol) {
  if (pairs.empty()) throw DomainError("monotonicity_defect: no pairs");
  const auto& dom = u.domain();
  double worst = kInf;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& pr = pairs[k];
    if (!subdifferential_contains(u, pr.x, pr.p, tol) || !subdifferential_contains(u, pr.y, pr.q, tol))
      throw DomainError("monotonicity_defect: pair " + std::to_string(k) + " is not a subgradient pair");
    const Point dq = sub(pr.q, pr.p);
    const Point dx = sub(dom.node(pr.y), dom.node(pr.x));
    worst = std::min(worst, dot(dq, dx));
  }
  return worst;
}

GridFunction sample_polynomial(const GridDomain& domain, const QuadraticPolynomial& phi) {
  if (phi.q.size() != domain.dim() || phi.P.dim() != domain.dim())
    throw DomainError("sample_polynomial: dimension mismatch");
  std::vector<double> v(domain.size());
#pragma omp parallel
  {
    Point y(domain.dim());
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < v.size(); ++i) {
      domain.node_into(i, y);
      v[i] = phi.value(y);
    }
  }
  return GridFunction(domain, std::move(v));
}

GridFunction shift_by_quadratic(const GridFunction& u, const QuadraticPolynomial& phi) {
  return add(u, sample_polynomial(u.domain(), phi));
}

}  // namespace qcvx::convex
