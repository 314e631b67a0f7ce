#include "qcvx/alexandrov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcvx/convex.hpp"

namespace qcvx::alexandrov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multi-index offsets whose physical length is at most s.
std::vector<std::vector<long>> ball_offsets(const GridDomain& dom, double s) {
  const std::size_t n = dom.dim();
  std::vector<long> reach(n);
  for (std::size_t k = 0; k < n; ++k) reach[k] = static_cast<long>(std::floor(s / dom.spacing(k) + 1e-9));
  std::vector<std::vector<long>> out;
  std::vector<long> o(n);
  for (std::size_t k = 0; k < n; ++k) o[k] = -reach[k];
  const double lim = s * (1.0 + 1e-12);
  while (true) {
    double len2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = static_cast<double>(o[k]) * dom.spacing(k);
      len2 += d * d;
    }
    if (std::sqrt(len2) <= lim) out.push_back(o);
    std::size_t k = n;
    while (k-- > 0) {
      if (o[k] < reach[k]) {
        ++o[k];
        break;
      }
      o[k] = -reach[k];
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

// Linear index of base + offset, or nullopt when it leaves the box.
std::optional<std::size_t> shifted(const GridDomain& dom, std::size_t base, const std::vector<long>& o) {
  long lin = static_cast<long>(base);
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    const long at = static_cast<long>(dom.index_along(base, k)) + o[k];
    if (at < 0 || at >= static_cast<long>(dom.shape()[k])) return std::nullopt;
    lin += o[k] * static_cast<long>(dom.stride(k));
  }
  return static_cast<std::size_t>(lin);
}

}  // namespace

ProxResult prox(const GridFunction& u, std::span<const double> y, double r) {
  if (!(r > 0.0)) throw DomainError("prox: r must be positive");
  const auto& dom = u.domain();
  if (y.size() != dom.dim()) throw DomainError("prox: point dimension mismatch");
  Point z(dom.dim());
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    dom.node_into(i, z);
    const double d = distance(z, y);
    const double obj = r * u[i] + 0.5 * d * d;
    if (obj < best) best = obj, arg = i;
  }
  ProxResult res{Point(y.begin(), y.end()), arg, dom.node(arg), best};
  for (std::size_t k = 0; k < dom.dim(); ++k) res.p[k] = (y[k] - res.p[k]) / r;
  return res;
}

double prox_margin(const GridFunction& u, double r) { return 2.0 * std::sqrt(r * u.sup_norm()); }

GridFunction strongly_convex_lift(const GridFunction& u, double r) {
  if (!(r > 0.0)) throw DomainError("r must be positive");
  return add_isotropic_quadratic(scale(u, r), 1.0, Point(u.domain().dim(), 0.0));
}

std::vector<std::size_t> gradient_inverse_G(const GridFunction& u, double r, const legendre::DualGrid& dual) {
  const GridFunction f = strongly_convex_lift(u, r);
  legendre::SweepArgmax am;
  legendre::conjugate_values(f.domain(), f.values(), dual.grid, &am);
  return legendre::backtrace(f.domain(), dual.grid, am);
}

double g_contraction_defect(const GridDomain& primal, const legendre::DualGrid& dual,
                            const std::vector<std::size_t>& G) {
  const auto& dg = dual.grid;
  double worst = -kInf;
#pragma omp parallel
  {
    Point y1(dg.dim()), y2(dg.dim()), x1(dg.dim()), x2(dg.dim());
#pragma omp for schedule(dynamic, 16) reduction(max : worst)
    for (std::size_t a = 0; a < dg.size(); ++a) {
      dg.node_into(a, y1);
      primal.node_into(G[a], x1);
      for (std::size_t b = a + 1; b < dg.size(); ++b) {
        dg.node_into(b, y2);
        primal.node_into(G[b], x2);
        worst = std::max(worst, distance(x1, x2) - distance(y1, y2));
      }
    }
  }
  return dg.size() < 2 ? 0.0 : worst;
}

double expansive_defect(const GridFunction& f, const std::vector<std::pair<SlopePair, SlopePair>>& pairs,
                        double tol) {
  if (pairs.empty()) throw DomainError("expansive_defect: no pairs");
  const auto& dom = f.domain();
  double worst = -kInf;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [a, b] = pairs[k];
    if (!convex::subdifferential_contains(f, a.x, a.y, tol) || !convex::subdifferential_contains(f, b.x, b.y, tol))
      throw DomainError("expansive_defect: pair " + std::to_string(k) + " is not in the subdifferential");
    worst = std::max(worst, distance(dom.node(a.x), dom.node(b.x)) - distance(a.y, b.y));
  }
  return worst;
}

LegendrePotential legendre_potential(const GridFunction& u, double r, const legendre::DualGrid& dual) {
  GridFunction f = strongly_convex_lift(u, r);
  legendre::SweepArgmax am;
  std::vector<double> gv = legendre::conjugate_values(f.domain(), f.values(), dual.grid, &am);
  LegendrePotential lp{f, GridFunction(dual.grid, std::move(gv)), legendre::backtrace(f.domain(), dual.grid, am)};
  lp.g_convex = convex::is_convex(lp.g, 1e-9);

  const auto& dg = dual.grid;
  const auto& pd = f.domain();
  Point y(dg.dim()), x(dg.dim());
  for (std::size_t j = 0; j < dg.size(); ++j) {
    dg.node_into(j, y);
    pd.node_into(lp.G[j], x);
    lp.fenchel_defect = std::max(lp.fenchel_defect, std::abs(f[lp.G[j]] + lp.g[j] - dot(x, y)));
    if (!dg.is_interior(j)) continue;
    for (std::size_t k = 0; k < dg.dim(); ++k) {
      const std::size_t st = dg.stride(k);
      const double d = (lp.g[j + st] - lp.g[j - st]) / (2.0 * dg.spacing(k));
      lp.gradient_defect = std::max(lp.gradient_defect, std::abs(d - x[k]));
    }
  }
  return lp;
}

HessianSample numerical_hessian(const GridFunction& u, std::size_t x) {
  const auto& dom = u.domain();
  const std::size_t n = dom.dim();
  HessianSample s{x, SymMatrix(n), dom.is_interior(x), 0.0};
  for (std::size_t k = 0; k < n; ++k) s.scale = std::max(s.scale, dom.spacing(k));
  if (!s.valid) return s;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t sk = dom.stride(k);
    const double hk = dom.spacing(k);
    s.H.set(k, k, (u[x + sk] - 2.0 * u[x] + u[x - sk]) / (hk * hk));
    for (std::size_t l = k + 1; l < n; ++l) {
      const std::size_t sl = dom.stride(l);
      const double hl = dom.spacing(l);
      const double c = u[x + sk + sl] - u[x + sk - sl] - u[x - sk + sl] + u[x - sk - sl];
      s.H.set(k, l, c / (4.0 * hk * hl));
    }
  }
  return s;
}

Point numerical_gradient(const GridFunction& u, std::size_t x, const std::vector<char>& mask) {
  const auto& dom = u.domain();
  Point g(dom.dim(), 0.0);
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    const std::size_t at = dom.index_along(x, k), st = dom.stride(k), len = dom.shape()[k];
    const double h = dom.spacing(k);
    const auto has = [&](long off) {
      const long j = static_cast<long>(at) + off;
      if (j < 0 || j >= static_cast<long>(len)) return false;
      return mask[static_cast<std::size_t>(static_cast<long>(x) + off * static_cast<long>(st))] != 0;
    };
    const auto at_off = [&](long off) { return u[static_cast<std::size_t>(static_cast<long>(x) + off * static_cast<long>(st))]; };
    if (has(-1) && has(1)) g[k] = (at_off(1) - at_off(-1)) / (2.0 * h);
    else if (has(1) && has(2)) g[k] = (-3.0 * u[x] + 4.0 * at_off(1) - at_off(2)) / (2.0 * h);
    else if (has(-1) && has(-2)) g[k] = (3.0 * u[x] - 4.0 * at_off(-1) + at_off(-2)) / (2.0 * h);
    else if (has(1)) g[k] = (at_off(1) - u[x]) / h;
    else if (has(-1)) g[k] = (u[x] - at_off(-1)) / h;
  }
  return g;
}

Point numerical_gradient(const GridFunction& u, std::size_t x) {
  return numerical_gradient(u, x, std::vector<char>(u.size(), 1));
}

AlexandrovResult alexandrov_statistic(const GridFunction& u, double lambda, double taylor_tol,
                                      const std::vector<double>& radii) {
  const auto& dom = u.domain();
  const std::size_t n = dom.dim();
  std::vector<std::vector<std::vector<long>>> offsets;
  for (double s : radii) {
    if (!(s > 0.0)) throw DomainError("alexandrov_statistic: radii must be positive");
    offsets.push_back(ball_offsets(dom, s));
  }
  const std::vector<char> all(u.size(), 1);
  std::vector<char> pass(dom.size(), 0), interior(dom.size(), 0);

#pragma omp parallel
  {
    Point d(n);
#pragma omp for schedule(dynamic, 64)
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (!dom.is_interior(i)) continue;
      interior[i] = 1;
      const HessianSample hs = numerical_hessian(u, i);
      if (!hs.valid || hs.H.min_eigenvalue() < -lambda - taylor_tol) continue;
      const Point p = numerical_gradient(u, i, all);
      bool ok = true;
      for (std::size_t t = 0; t < radii.size() && ok; ++t) {
        double worst = 0.0;
        for (const auto& o : offsets[t]) {
          const auto j = shifted(dom, i, o);
          if (!j) continue;
          for (std::size_t k = 0; k < n; ++k) d[k] = static_cast<double>(o[k]) * dom.spacing(k);
          const double rem = u[*j] - u[i] - dot(p, d) - 0.5 * hs.H.quad_form(d);
          worst = std::max(worst, std::abs(rem));
        }
        ok = worst <= taylor_tol * radii[t] * radii[t];
      }
      pass[i] = ok;
    }
  }

  AlexandrovResult res;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (!interior[i]) continue;
    ++res.tested;
    if (pass[i]) ++res.passed;
    else res.failing.push_back(i);
  }
  return res;
}

HessianViaG hessian_via_G(const GridFunction& u, double r, const legendre::DualGrid& dual,
                          std::span<const double> y0, const std::vector<double>& radii) {
  const auto& dg = dual.grid;
  const auto& pd = u.domain();
  const std::size_t n = pd.dim();
  const auto j0 = dg.find_node(y0);
  if (!j0) throw DomainError("hessian_via_G: y0 must be a dual node");
  if (!dg.is_interior(*j0)) throw DomainError("hessian_via_G: y0 needs dual neighbours on every axis");

  const std::vector<std::size_t> G = gradient_inverse_G(u, r, dual);
  std::vector<double> Bd(n * n);
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t st = dg.stride(l);
    const Point xp = pd.node(G[*j0 + st]), xm = pd.node(G[*j0 - st]);
    for (std::size_t k = 0; k < n; ++k) Bd[k * n + l] = (xp[k] - xm[k]) / (2.0 * dg.spacing(l));
  }
  HessianViaG res{SymMatrix::from_dense(n, Bd), kInf, std::nullopt, G[*j0], {}};
  const double lo = res.B.min_eigenvalue(), hi = res.B.max_eigenvalue();
  if (lo > 0.0) res.condition = hi / lo;
  if (!(res.condition <= 1e8)) return res;

  Eigen::MatrixXd Bm(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) Bm(a, b) = res.B(a, b);
  const Eigen::MatrixXd Am = Bm.inverse();
  std::vector<double> Ad(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) Ad[a * n + b] = Am(a, b);
  res.A = SymMatrix::from_dense(n, Ad);

  const GridFunction f = strongly_convex_lift(u, r);
  const Point x0 = pd.node(res.x0);
  for (double s : radii) {
    double worst = 0.0;
    for (const auto& o : ball_offsets(pd, s)) {
      const auto j = shifted(pd, res.x0, o);
      if (!j) continue;
      const Point d = sub(pd.node(*j), x0);
      const double rem = f[*j] - f[res.x0] - dot(y0, d) - 0.5 * res.A->quad_form(d);
      worst = std::max(worst, std::abs(rem));
    }
    res.remainders.push_back(worst / (s * s));
  }
  return res;
}

}  // namespace qcvx::alexandrov
