#include "qcvx/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcvx/alexandrov.hpp"
#include "qcvx/legendre.hpp"

namespace qcvx::contact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Lower convex hull of the points pushed so far, for sweeps where every query
// point lies strictly right of all pushed points.
class PrefixHull {
 public:
  bool empty() const { return x_.empty(); }

  void push(double x, double f) {
    while (x_.size() >= 2) {
      const std::size_t b = x_.size() - 1, a = b - 1;
      if ((f_[b] - f_[a]) / (x_[b] - x_[a]) >= (f - f_[b]) / (x - x_[b])) {
        x_.pop_back();
        f_.pop_back();
      } else {
        break;
      }
    }
    x_.push_back(x);
    f_.push_back(f);
  }

  // max over pushed z of (f - F(z)) / (x - z); the chord slope is unimodal along the hull.
  double max_chord(double x, double f) const {
    const auto chord = [&](std::size_t k) { return (f - f_[k]) / (x - x_[k]); };
    std::size_t lo = 0, hi = x_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (chord(mid + 1) >= chord(mid)) lo = mid + 1;
      else hi = mid;
    }
    return chord(lo);
  }

  // max over pushed z of (s z - F(z)): the first hull vertex whose outgoing edge is at least s.
  double support(double s) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if ((f_[mid + 1] - f_[mid]) / (x_[mid + 1] - x_[mid]) < s) lo = mid + 1;
      else hi = mid;
    }
    return s * x_[lo] - f_[lo];
  }

 private:
  std::vector<double> x_, f_;
};

// Runs visit(t, hull) over region positions, left to right or (mirrored x -> -x)
// right to left, with the hull holding every earlier position.
template <class Visit>
void sweep_1d(const GridDomain& dom, const std::vector<std::size_t>& m, const std::vector<double>& F,
              bool mirrored, Visit visit) {
  PrefixHull hull;
  const double sign = mirrored ? -1.0 : 1.0;
  for (std::size_t q = 0; q < m.size(); ++q) {
    const std::size_t t = mirrored ? m.size() - 1 - q : q;
    const double x = sign * dom.coord(m[t], 0);
    if (!hull.empty()) visit(t, x, hull);
    hull.push(x, F[m[t]]);
  }
}

}  // namespace

bool is_upper_contact_jet(const GridFunction& u, const Jet& jet, double rho, bool strict, double tol) {
  if (!(rho > 0.0)) throw DomainError("is_upper_contact_jet: rho must be positive");
  const auto& dom = u.domain();
  if (jet.x.size() != dom.dim() || jet.p.size() != dom.dim() || jet.A.dim() != dom.dim())
    throw DomainError("is_upper_contact_jet: jet dimension mismatch");
  const IndexRegion ball = region_ball(dom, jet.x, rho);
  if (ball.empty()) throw DomainError("is_upper_contact_jet: no grid node within rho of the jet point");
  Point d(dom.dim());
  for (auto j : ball.members()) {
    dom.node_into(j, d);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= jet.x[k];
    const double bound = jet.value + dot(jet.p, d) + 0.5 * jet.A.quad_form(d);
    const double d2 = dot(d, d);
    const bool at_x = d2 <= 1e-24 * (1.0 + dot(jet.x, jet.x));
    if (strict && !at_x) {
      if (!(u[j] + tol * d2 < bound)) return false;
    } else if (u[j] > bound + tol) {
      return false;
    }
  }
  return true;
}

double contact_violation(const GridFunction& u, const IndexRegion& region, const SymMatrix& A,
                         std::size_t x, std::span<const double> p) {
  const auto& dom = u.domain();
  const Point xc = dom.node(x);
  double worst = -kInf;
  Point d(dom.dim());
  for (auto j : region.members()) {
    dom.node_into(j, d);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= xc[k];
    worst = std::max(worst, u[j] - u[x] - dot(p, d) - 0.5 * A.quad_form(d));
  }
  return worst;
}

ContactSet global_contact_set(const GridFunction& u, const IndexRegion& region, const SymMatrix& A, double tol) {
  if (region.empty()) throw DomainError("global_contact_set: empty region");
  const auto& dom = u.domain();
  const std::size_t n = dom.dim();
  if (A.dim() != n) throw DomainError("global_contact_set: type matrix dimension mismatch");
  if (!(region.domain() == dom)) throw DomainError("global_contact_set: region lives on another grid");

  std::vector<double> F(dom.size());
#pragma omp parallel
  {
    Point y(n);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < F.size(); ++i) {
      dom.node_into(i, y);
      F[i] = 0.5 * A.quad_form(y) - u[i];
    }
  }
  const std::vector<char> mask = region.mask();
  const legendre::Envelope env = legendre::envelope_on(dom, F, mask);
  const GridDomain& dual = env.dual.grid;

  std::vector<std::size_t> members;
  double fmax = 0.0, xmax = 0.0, smax2 = 0.0, dual_h = 0.0;
  for (auto i : region.members()) {
    if (F[i] - env.values[i] <= tol) members.push_back(i);
    fmax = std::max(fmax, std::abs(F[i]));
    xmax = std::max(xmax, norm(dom.node(i)));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::max(std::abs(dual.mins()[k]), std::abs(dual.maxs()[k]));
    smax2 += s * s;
    dual_h = std::max(dual_h, dual.spacing(k));
  }
  // Witnesses pass the raw inequality up to tol plus accumulated rounding.
  const double slack = tol + 1e-11 * (1.0 + fmax + xmax * std::sqrt(smax2));

  std::vector<Point> witnesses(members.size());
  std::vector<char> failed(members.size(), 0);
  const auto envelope_witness = [&](std::size_t x, const Point& Ax) {
    Point p = Ax;
    if (!env.exact.empty() && !env.exact[x].empty()) {
      for (std::size_t k = 0; k < n; ++k) p[k] -= env.exact[x][k];
      return p;
    }
    if (env.support[x] == kNone) return p;
    const Point s = dual.node(env.support[x]);
    for (std::size_t k = 0; k < n; ++k) p[k] -= s[k];
    return p;
  };

  if (n == 1) {
    // Chord bounds and witness checks through hull sweeps, O(N log N) overall.
    // In terms of F the contact inequality at x with slope s = Ax - p reads
    // F(z) >= F(x) + s (z - x) on the region.
    const auto& m = region.members();
    std::vector<double> lower(m.size(), -kInf), upper(m.size(), kInf);
    sweep_1d(dom, m, F, false, [&](std::size_t t, double x, const PrefixHull& h) { lower[t] = h.max_chord(x, F[m[t]]); });
    sweep_1d(dom, m, F, true, [&](std::size_t t, double x, const PrefixHull& h) { upper[t] = -h.max_chord(x, F[m[t]]); });

    std::vector<std::size_t> pos(members.size());
    std::vector<double> slope(m.size(), 0.0);
    std::vector<char> is_member(m.size(), 0);
    for (std::size_t t = 0, q = 0; t < members.size(); ++t) {
      while (m[q] != members[t]) ++q;
      pos[t] = q;
      is_member[q] = 1;
    }
    const double h = dom.spacing(0);
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < members.size(); ++t) {
      const std::size_t x = members[t], q = pos[t];
      const Point Ax = A.apply(dom.node(x));
      Point p = alexandrov::numerical_gradient(u, x, mask);
      const double plo = Ax[0] - upper[q], phi = Ax[0] - lower[q];
      if (plo <= phi) {
        // Prefer slopes that are also local chord-compatible for u.
        const std::size_t at = dom.index_along(x, 0);
        double llo = -kInf, lhi = kInf;
        if (at > 0 && mask[x - 1]) llo = (u[x] - u[x - 1]) / h;
        if (at + 1 < dom.size() && mask[x + 1]) lhi = (u[x + 1] - u[x]) / h;
        double lo = std::max(plo, llo), hi = std::min(phi, lhi);
        if (lo > hi) lo = plo, hi = phi;
        p[0] = std::clamp(p[0], lo, hi);
      } else {
        p = envelope_witness(x, Ax);
      }
      slope[q] = Ax[0] - p[0];
      witnesses[t] = std::move(p);
    }

    std::vector<double> worst(m.size(), 0.0);
    sweep_1d(dom, m, F, false, [&](std::size_t t, double x, const PrefixHull& hl) {
      if (is_member[t]) worst[t] = std::max(worst[t], F[m[t]] - slope[t] * x + hl.support(slope[t]));
    });
    sweep_1d(dom, m, F, true, [&](std::size_t t, double x, const PrefixHull& hl) {
      if (is_member[t]) worst[t] = std::max(worst[t], F[m[t]] + slope[t] * x + hl.support(-slope[t]));
    });
    for (std::size_t t = 0; t < members.size(); ++t)
      if (worst[pos[t]] > slack) failed[t] = 1;
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t t = 0; t < members.size(); ++t) {
      const std::size_t x = members[t];
      const Point Ax = A.apply(dom.node(x));
      Point p = alexandrov::numerical_gradient(u, x, mask);
      if (contact_violation(u, region, A, x, p) > slack) p = envelope_witness(x, Ax);
      if (contact_violation(u, region, A, x, p) > slack) failed[t] = 1;
      witnesses[t] = std::move(p);
    }
  }
  for (std::size_t t = 0; t < members.size(); ++t)
    if (failed[t])
      throw ConsistencyError("global_contact_set: witness at node " + std::to_string(members[t]) +
                             " fails the contact inequality");

  return ContactSet{region, IndexRegion(dom, std::move(members), region.shape()), A, std::move(witnesses), dual_h};
}

RadiusContact radius_contact(const GridFunction& u, const IndexRegion& region, std::span<const double> v,
                             double r, double tol) {
  if (!(r > 0.0)) throw DomainError("radius_contact: r must be positive");
  if (region.empty()) throw DomainError("radius_contact: empty region");
  const auto& dom = u.domain();
  std::vector<double> val(region.size());
  Point y(dom.dim());
  double best = -kInf;
  for (std::size_t t = 0; t < region.size(); ++t) {
    const std::size_t j = region.members()[t];
    dom.node_into(j, y);
    const double d = distance(y, v);
    val[t] = u[j] - d * d / (2.0 * r);
    best = std::max(best, val[t]);
  }
  std::vector<std::size_t> hits;
  for (std::size_t t = 0; t < region.size(); ++t)
    if (val[t] >= best - tol) hits.push_back(region.members()[t]);
  return RadiusContact{best, IndexRegion(dom, std::move(hits))};
}

double contact_radius_bound(const GridFunction& u, const IndexRegion& region, double r) {
  if (!(r > 0.0)) throw DomainError("r must be positive");
  return std::sqrt(2.0 * r * oscillation(u, region));
}

IndexRegion interior_contact_region(const GridFunction& u, const IndexRegion& region, double r) {
  const double delta = contact_radius_bound(u, region, r);
  std::vector<std::size_t> keep;
  for (auto i : region.members())
    if (region.boundary_distance(i) > delta) keep.push_back(i);
  return IndexRegion(region.domain(), std::move(keep), region.shape());
}

GridFunction jensen_to_slodkowski(const GridFunction& w, std::span<const double> x, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("jensen_to_slodkowski: lambda must be non-negative");
  return add_isotropic_quadratic(w, lambda, x);
}

std::vector<double> default_eps_schedule(double eps0, std::size_t count) {
  std::vector<double> e(count);
  for (std::size_t j = 0; j < count; ++j) e[j] = std::ldexp(eps0, -static_cast<int>(j));
  return e;
}

JetApproximation jet_approximation(const GridFunction& u, const Jet& jet0, const IndexRegion& E,
                                   const std::vector<double>& eps_schedule, double lambda, double rho0) {
  const auto& dom = u.domain();
  const std::size_t n = dom.dim();
  if (!(lambda >= 0.0)) throw DomainError("jet_approximation: lambda must be non-negative");
  for (auto i : E.members())
    if (!dom.is_interior(i)) throw DomainError("jet_approximation: E holds a node without a Hessian stencil");
  for (std::size_t j = 0; j < eps_schedule.size(); ++j)
    if (!(eps_schedule[j] > 0.0) || (j > 0 && !(eps_schedule[j] < eps_schedule[j - 1])))
      throw DomainError("jet_approximation: schedule must be positive and decreasing");
  if (!is_upper_contact_jet(u, jet0, rho0, false, 1e-9))
    throw DomainError("jet_approximation: jet0 is not an upper contact jet at radius rho0");

  JetApproximation out;
  for (double eps : eps_schedule) {
    const IndexRegion ball = intersect(region_ball(dom, jet0.x, eps), E);
    if (ball.size() < 3) {
      out.resolution_exhausted = eps;
      break;
    }
    const ContactSet cs = global_contact_set(u, ball, jet0.A + SymMatrix::identity(n, eps));
    std::size_t pick = kNone;
    double best = kInf;
    for (auto x : cs.members.members()) {
      bool stencil = true;
      for (std::size_t k = 0; k < n && stencil; ++k)
        stencil = ball.contains(x - dom.stride(k)) && ball.contains(x + dom.stride(k));
      if (!stencil) continue;
      const double d = distance(dom.node(x), jet0.x);
      if (d < best) best = d, pick = x;
    }
    if (pick == kNone) {
      out.resolution_exhausted = eps;
      break;
    }
    out.samples.push_back(
        JetSample{pick, alexandrov::numerical_gradient(u, pick), alexandrov::numerical_hessian(u, pick).H, eps});
  }
  return out;
}

}  // namespace qcvx::contact
