#include "qcvx/vertex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "qcvx/convex.hpp"

namespace qcvx::vertex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool inside_shape(const IndexRegion& region, std::span<const double> v) {
  const auto& dom = region.domain();
  if (std::holds_alternative<BoxShape>(region.shape())) {
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] < dom.mins()[k] || v[k] > dom.maxs()[k]) return false;
    return true;
  }
  if (const auto* b = std::get_if<BallShape>(&region.shape())) return distance(v, b->center) <= b->rho;
  return false;
}

std::size_t node_at(const GridDomain& dom, std::span<const double> x0) {
  const auto i = dom.find_node(x0);
  if (!i) throw DomainError("x0 must be a grid node");
  return *i;
}

double max_spacing(const GridDomain& dom) {
  double h = 0.0;
  for (std::size_t k = 0; k < dom.dim(); ++k) h = std::max(h, dom.spacing(k));
  return h;
}

}  // namespace

double Paraboloid::value(std::span<const double> y) const {
  const double d = distance(y, v);
  return c + d * d / (2.0 * r);
}

Point vertex_of_jet(std::span<const double> x, std::span<const double> p, double r) {
  if (!(r > 0.0)) throw DomainError("vertex_of_jet: r must be positive");
  Point v(x.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = x[k] - r * p[k];
  return v;
}

std::vector<VertexPair> vertex_map(const GridFunction& u, const IndexRegion& region, double r, double tol) {
  if (!(r > 0.0)) throw DomainError("vertex_map: r must be positive");
  if (!convex::is_convex_on(u, region, 1e-9)) throw DomainError("vertex_map: u is not convex on the region");
  const auto& dom = u.domain();
  const auto cs = contact::global_contact_set(u, region, SymMatrix::identity(dom.dim(), 1.0 / r), tol);

  double h2 = 0.0;
  for (std::size_t k = 0; k < dom.dim(); ++k) h2 += dom.spacing(k) * dom.spacing(k);
  const double bound = std::sqrt(2.0 * r * oscillation(u, region) + 0.25 * h2) + tol;

  std::vector<VertexPair> out;
  out.reserve(cs.members.size());
  for (std::size_t t = 0; t < cs.members.size(); ++t) {
    const std::size_t x = cs.members.members()[t];
    const Point xc = dom.node(x);
    Point v = vertex_of_jet(xc, cs.witnesses[t], r);
    if (inside_shape(region, v) && distance(v, xc) > bound)
      throw ConsistencyError("vertex_map: displacement bound fails at node " + std::to_string(x));
    out.push_back(VertexPair{x, std::move(v)});
  }
  return out;
}

double contraction_defect(const GridDomain& domain, const std::vector<VertexPair>& pairs) {
  if (pairs.size() < 2) throw DomainError("contraction_defect: need at least two pairs");
  double worst = -kInf;
  if (domain.dim() == 1) {
    // With x_a <= x_b, |v_b - v_a| - (x_b - x_a) is the larger of
    // (v_b - x_b) - (v_a - x_a) and (v_a + x_a) - (v_b + x_b): prefix maxima suffice.
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pairs[a].x < pairs[b].x; });
    double best_minus = -kInf, best_plus = -kInf;
    for (std::size_t i : order) {
      const double x = domain.coord(pairs[i].x, 0), v = pairs[i].v[0];
      worst = std::max({worst, (v - x) + best_minus, best_plus - (v + x)});
      best_minus = std::max(best_minus, x - v);
      best_plus = std::max(best_plus, v + x);
    }
    return worst;
  }
  std::vector<Point> xs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) xs[i] = domain.node(pairs[i].x);
#pragma omp parallel for schedule(dynamic, 32) reduction(max : worst)
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b)
      worst = std::max(worst, distance(pairs[a].v, pairs[b].v) - distance(xs[a], xs[b]));
  return worst;
}

Slab slab_of_paraboloids(const Paraboloid& P1, const Paraboloid& P2) {
  if (P1.v.size() != P2.v.size()) throw DomainError("slab: dimension mismatch");
  if (!(P1.r > 0.0) || std::abs(P1.r - P2.r) > 1e-12 * P1.r) throw DomainError("slab: radii must be equal");
  const double d = distance(P1.v, P2.v);
  if (!(d > 0.0)) throw DomainError("slab: vertices coincide");
  Slab s;
  s.e = sub(P2.v, P1.v);
  for (double& c : s.e) c /= d;
  s.m = (P2.c - P1.c) / d;
  s.lo = dot(s.e, P1.v) + P1.r * s.m;
  s.hi = dot(s.e, P2.v) + P1.r * s.m;
  s.width = s.hi - s.lo;
  return s;
}

CommonTangent common_tangent(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> w_bar) {
  const Slab s = slab_of_paraboloids(P1, P2);
  const std::size_t n = P1.v.size();
  if (w_bar.size() != n) throw DomainError("common_tangent: w_bar dimension mismatch");
  if (std::abs(dot(w_bar, s.e)) > 1e-12 * (1.0 + norm(w_bar)))
    throw DomainError("common_tangent: w_bar must be orthogonal to the vertex direction");
  const double r = P1.r;
  Point shift(n), y1(n), y2(n);
  for (std::size_t k = 0; k < n; ++k) {
    shift[k] = r * s.m * s.e[k] + w_bar[k];
    y1[k] = P1.v[k] + shift[k];
    y2[k] = P2.v[k] + shift[k];
  }
  CommonTangent ct;
  ct.z1 = y1;
  ct.z1.push_back(P1.value(y1));
  ct.z2 = y2;
  ct.z2.push_back(P2.value(y2));
  ct.normal.resize(n + 1);
  Point slope(n);
  for (std::size_t k = 0; k < n; ++k) ct.normal[k] = slope[k] = shift[k] / r;
  ct.normal[n] = -1.0;

  // Plane t = a + <slope, y>; min of c + |y-v|^2/(2r) - a - <slope,y> is at y = v + r slope.
  const double a = ct.z1[n] - dot(slope, y1);
  const double half = 0.5 * r * dot(slope, slope);
  ct.support_defect = std::min(P1.c - a - dot(slope, P1.v) - half, P2.c - a - dot(slope, P2.v) - half);
  return ct;
}

double tangent_support_defect(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> y) {
  if (std::abs(P1.r - P2.r) > 1e-12 * P1.r) throw DomainError("tangent_support: radii must be equal");
  const std::size_t n = P1.v.size();
  Point slope(n);
  for (std::size_t k = 0; k < n; ++k) slope[k] = (y[k] - P1.v[k]) / P1.r;
  const double a = P1.value(y) - dot(slope, y);
  return P2.c - a - dot(slope, P2.v) - 0.5 * P2.r * dot(slope, slope);
}

bool tangent_supports_both(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> y) {
  return tangent_support_defect(P1, P2, y) >= -1e-9 * (1.0 + std::abs(P1.c) + std::abs(P2.c));
}

void check_growth_condition(const GridFunction& u, std::span<const double> x0, double rho, double R, double tol) {
  if (!(rho > 0.0) || !(R > 0.0)) throw DomainError("rho and R must be positive");
  const auto& dom = u.domain();
  const std::size_t c = node_at(dom, x0);
  const IndexRegion ball = region_ball(dom, x0, rho);
  for (auto j : ball.members()) {
    if (j == c) continue;
    const double d = distance(dom.node(j), x0);
    const double w = u[j] - u[c];
    if (w < -tol || !(w < d * d / (2.0 * R) - tol))
      throw DomainError("growth condition 0 <= u < |y|^2/(2R) fails at node " + std::to_string(j));
  }
}

CoverageReport coverage_check(const GridFunction& u, std::span<const double> x0, double rho, double r, double R,
                              double tol) {
  if (!(r > 0.0) || !(r <= R)) throw DomainError("coverage_check: need 0 < r <= R");
  check_growth_condition(u, x0, rho, R, tol);
  const auto& dom = u.domain();
  const IndexRegion ball = region_ball(dom, x0, rho);
  const auto pairs = vertex_map(u, ball, r, tol);

  CoverageReport rep;
  rep.target_radius = rho * (1.0 - std::sqrt(r / R));
  if (rep.target_radius - tol >= 0.0) {
    const IndexRegion target = region_ball(dom, x0, rep.target_radius - tol);
    for (auto j : target.members()) rep.probes.push_back(dom.node(j));
  }
  if (rep.probes.empty()) rep.probes.emplace_back(x0.begin(), x0.end());

  std::vector<const VertexPair*> by_node(dom.size(), nullptr);
  for (const auto& pr : pairs) by_node[pr.x] = &pr;

  rep.attained.assign(rep.probes.size(), 0);
  rep.contained.assign(rep.probes.size(), 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t t = 0; t < rep.probes.size(); ++t) {
    const Point& v = rep.probes[t];
    const auto rc = contact::radius_contact(u, ball, v, r, tol);
    bool inside = !rc.contacts.empty(), hit = false;
    for (auto x : rc.contacts.members()) {
      inside = inside && distance(dom.node(x), x0) < rho;
      const VertexPair* pr = by_node[x];
      if (!pr) continue;
      bool close = true;
      for (std::size_t k = 0; k < dom.dim(); ++k)
        close = close && std::abs(pr->v[k] - v[k]) <= 0.5 * dom.spacing(k) * (1.0 + 1e-9);
      hit = hit || close;
    }
    rep.contained[t] = inside;
    rep.attained[t] = hit;
  }
  for (std::size_t t = 0; t < rep.probes.size(); ++t)
    if (!rep.attained[t] || !rep.contained[t]) ++rep.failures;
  return rep;
}

double unit_ball_volume(std::size_t n) {
  const double d = static_cast<double>(n);
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

MeasureChain measure_chain(const GridFunction& u, std::span<const double> x0, double rho, double r, double R,
                           double tol) {
  if (!(r > 0.0) || !(r <= R)) throw DomainError("measure_chain: need 0 < r <= R");
  check_growth_condition(u, x0, rho, R, tol);
  const auto& dom = u.domain();
  const std::size_t n = dom.dim();
  const IndexRegion ball = region_ball(dom, x0, rho);
  const auto pairs = vertex_map(u, ball, r, tol);

  // Nodes within h/2 per axis of some vertex image: floor/ceil candidates per axis.
  std::set<std::size_t> hit;
  std::vector<std::size_t> idx(n);
  for (const auto& pr : pairs) {
    std::vector<std::vector<std::size_t>> cand(n);
    bool any = true;
    for (std::size_t k = 0; k < n && any; ++k) {
      const double t = (pr.v[k] - dom.mins()[k]) / dom.spacing(k);
      for (double c : {std::floor(t), std::ceil(t)}) {
        if (c < 0.0 || c > static_cast<double>(dom.shape()[k] - 1)) continue;
        if (std::abs(t - c) > 0.5 * (1.0 + 1e-9)) continue;
        const auto ci = static_cast<std::size_t>(c);
        if (std::find(cand[k].begin(), cand[k].end(), ci) == cand[k].end()) cand[k].push_back(ci);
      }
      any = !cand[k].empty();
    }
    if (!any) continue;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      for (std::size_t k = 0; k < n; ++k) idx[k] = cand[k][pick[k]];
      hit.insert(dom.ravel(idx));
      std::size_t k = n;
      while (k-- > 0) {
        if (++pick[k] < cand[k].size()) break;
        pick[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
  }

  MeasureChain mc;
  const double target = rho * (1.0 - std::sqrt(r / R));
  mc.lhs = unit_ball_volume(n) * std::pow(target, static_cast<double>(n));
  mc.mid = static_cast<double>(hit.size()) * dom.cell_volume();
  mc.rhs = static_cast<double>(pairs.size()) * dom.cell_volume();
  mc.h = max_spacing(dom);
  return mc;
}

}  // namespace qcvx::vertex
