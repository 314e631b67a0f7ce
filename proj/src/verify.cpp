#include "qcvx/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <numbers>
#include <sstream>

#include "qcvx/alexandrov.hpp"
#include "qcvx/contact.hpp"
#include "qcvx/convex.hpp"
#include "qcvx/corpus.hpp"
#include "qcvx/legendre.hpp"
#include "qcvx/reference.hpp"
#include "qcvx/vertex.hpp"

namespace qcvx::verify {

namespace {

using corpus::OracleFunction;
using corpus::QuadPiece;
using corpus::Rng;

// Counts cases and keeps the worst defect.
struct Tally {
  VerifyReport& rep;
  void add(bool ok, double defect) {
    ++rep.cases;
    if (!ok) ++rep.failures;
    if (std::isfinite(defect)) rep.worst_defect = std::max(rep.worst_defect, defect);
  }
  void fail() { add(false, 0.0); }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Point random_point(Rng& rng, std::size_t n, double lo, double hi) {
  Point p(n);
  for (double& x : p) x = rng.uniform(lo, hi);
  return p;
}

SymMatrix random_sym(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> dense(n * n);
  for (double& x : dense) x = rng.uniform(lo, hi);
  return SymMatrix::from_dense(n, dense);
}

// Rotation of diag(eigs) by a random angle (2-D) or the scalar itself (1-D).
SymMatrix rotated(Rng& rng, std::span<const double> eigs) {
  if (eigs.size() == 1) return SymMatrix(1, {eigs[0]});
  const double t = rng.uniform(0.0, std::numbers::pi);
  const double c = std::cos(t), s = std::sin(t);
  return SymMatrix(2, {c * c * eigs[0] + s * s * eigs[1], c * s * (eigs[0] - eigs[1]),
                       s * s * eigs[0] + c * c * eigs[1]});
}

double max_curvature(const OracleFunction& f) {
  double m = 0.0;
  for (const auto& p : f.pieces()) m = std::max(m, p.curvature.max_eigenvalue());
  return m;
}

std::size_t random_node_in(Rng& rng, const GridDomain& d, double lo, double hi) {
  return d.nearest(random_point(rng, d.dim(), lo, hi));
}

// Index of the unique maximizing piece at x, or -1 at a kink.
int active_piece(const OracleFunction& f, std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity(), second = best;
  int arg = -1;
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const double v = f.pieces()[i].value(x);
    if (v > best) {
      second = best;
      best = v;
      arg = static_cast<int>(i);
    } else {
      second = std::max(second, v);
    }
  }
  return best - second > corpus::activity_tolerance(best) ? arg : -1;
}

// 1. Fast conjugate against the O(NM) kernel.
void conjugate_oracle(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  for (int c = 0; c < 200; ++c) {
    const std::size_t N = 2 + rng.next() % 256, M = 2 + rng.next() % 256;
    const double a = rng.uniform(-3, 1), b = a + rng.uniform(0.5, 4);
    const double ya = rng.uniform(-5, 0), yb = ya + rng.uniform(0.5, 10);
    const auto d = GridDomain::line(a, b, N);
    std::vector<double> v(N);
    if (c % 2 == 0) {
      for (double& x : v) x = rng.uniform(-1, 1);
    } else {
      v = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 3, -2, 2), d).values();
    }
    const legendre::DualGrid dual{GridDomain::line(ya, yb, M)};
    const auto fast = legendre::conjugate(GridFunction(d, v), dual);
    const auto slow = reference::conjugate(GridFunction(d, v), dual.grid);
    double dev = 0.0;
    for (std::size_t j = 0; j < M; ++j) dev = std::max(dev, std::abs(fast[j] - slow[j]));
    dev /= 1.0 + max_abs(slow);
    t.add(dev <= 1e-12, dev);
  }
  rep.note = "relative deviation, threshold 1e-12";
}

// 2. Biconjugation returns convex data and the hull of the double well.
void involution(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  for (int c = 0; c < 100; ++c) {
    const bool two = c >= 70;
    const std::size_t N = two ? 15 + rng.next() % 17 : 50 + rng.next() % 451;
    const auto d = GridDomain::cube(two ? 2 : 1, -1, 1, N);
    const auto f = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 1 + rng.next() % 4, 0.0, 2.0), d);
    const auto env = legendre::biconjugate_envelope(f);
    double dev = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) dev = std::max(dev, std::abs(env[i] - f[i]));
    dev /= 1.0 + f.sup_norm();
    t.add(dev <= 1e-9, dev);
  }
  const auto d = GridDomain::line(-2, 2, 401);
  std::vector<double> xs(d.size()), vs(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    xs[i] = d.coord(i, 0);
    vs[i] = std::min((xs[i] + 1) * (xs[i] + 1), (xs[i] - 1) * (xs[i] - 1));
  }
  const auto env = legendre::biconjugate_envelope(GridFunction(d, vs));
  const auto hull = reference::lower_hull_values(xs, vs);
  double dev = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) dev = std::max(dev, std::abs(env[i] - hull[i]));
  t.add(dev <= 1e-9, dev);
  rep.note = "envelope deviation, threshold 1e-9 (double well against the monotone-chain hull)";
}

// 3. Subdifferential of |x|, monotonicity of validated pairs, Lipschitz bounds.
void subdifferential(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  {
    const auto d = GridDomain::line(-2, 2, 41);
    std::vector<double> v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v[i] = std::abs(d.coord(i, 0));
    const auto iv = convex::subdifferential_interval_1d(GridFunction(d, v), 20);
    const double dev = std::max(std::abs(iv.lower + 1.0), std::abs(iv.upper - 1.0));
    t.add(iv.lower == -1.0 && iv.upper == 1.0, dev);
  }

  std::size_t pairs_done = 0, rejected = 0;
  double worst_mono = std::numeric_limits<double>::infinity();
  for (int c = 0; pairs_done < 10000 && c < 200; ++c) {
    const bool two = c % 4 == 3;
    const auto d = two ? GridDomain::cube(2, -1, 1, 21) : GridDomain::line(-1, 1, 201);
    const auto u = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 3, 0.0, 2.0), d);
    const auto g = legendre::conjugate(u, legendre::auto_dual(u));
    std::vector<std::size_t> xs;
    std::vector<Point> ps;
    for (int k = 0; k < 60 && xs.size() < 33; ++k) {
      const std::size_t x = rng.next() % d.size();
      const auto p = convex::subgradient_witness(u, g, x);
      if (p && convex::subdifferential_contains(u, x, *p)) {
        xs.push_back(x);
        ps.push_back(*p);
      } else {
        ++rejected;
      }
    }
    std::vector<convex::SubgradientPair> pairs;
    for (std::size_t a = 0; a < xs.size() && pairs_done + pairs.size() < 10000; ++a)
      for (std::size_t b = a + 1; b < xs.size() && pairs_done + pairs.size() < 10000; ++b)
        pairs.push_back({xs[a], ps[a], xs[b], ps[b]});
    if (pairs.empty()) continue;
    const double m = convex::monotonicity_defect(u, pairs);
    worst_mono = std::min(worst_mono, m);
    pairs_done += pairs.size();
  }
  t.add(pairs_done >= 10000 && worst_mono >= -1e-9, -worst_mono);

  double worst_lip = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < 50; ++c) {
    const bool two = c % 2 == 1;
    const auto d = two ? GridDomain::cube(2, -1, 1, 31) : GridDomain::line(-1, 1, 301);
    const auto u = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 2.0), d);
    const auto region = region_ball(d, random_point(rng, d.dim(), -0.3, 0.3), rng.uniform(0.3, 0.7));
    const double C = convex::lipschitz_constant(u, region);
    const double dev = convex::lipschitz_defect(u, region, C) / (1.0 + u.sup_norm());
    worst_lip = std::max(worst_lip, dev);
    t.add(dev <= 1e-12, dev);
  }
  rep.note = "monotonicity over " + std::to_string(pairs_done) + " pairs (min " + fmt(worst_mono) + ", " +
             std::to_string(rejected) + " unvalidated witnesses skipped); Lipschitz defect max " + fmt(worst_lip);
}

// 4. Contact sets are invariant under adding a quadratic to u and its Hessian to A.
void shift_lemma(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = c < 50 ? 1 : 2;
    const auto d = n == 1 ? GridDomain::line(-1, 1, 81) : GridDomain::cube(2, -1, 1, 21);
    const auto u = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 2.0), d);
    const Point eig = random_point(rng, n, 0.0, 3.0);
    const SymMatrix A = rotated(rng, eig);
    const convex::QuadraticPolynomial phi{rng.uniform(-1, 1), random_point(rng, n, -1, 1), random_sym(rng, n, -1, 1)};
    const auto region = region_ball(d, random_point(rng, n, -0.2, 0.2), rng.uniform(0.5, 0.8));
    const auto a = contact::global_contact_set(u, region, A);
    const auto b = contact::global_contact_set(convex::shift_by_quadratic(u, phi), region, A + phi.P);
    std::size_t diff = 0;
    for (auto i : region.members()) diff += a.members.contains(i) != b.members.contains(i);
    t.add(diff == 0, static_cast<double>(diff));
  }
  rep.note = "defect = nodes whose membership differs, threshold 0";
}

// 5. Slab width and the tangent/slab dichotomy.
void slab(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + c % 3;
    const double r = rng.uniform(0.1, 2.0);
    const vertex::Paraboloid p1{random_point(rng, n, -1, 1), rng.uniform(-1, 1), r};
    const vertex::Paraboloid p2{random_point(rng, n, -1, 1), rng.uniform(-1, 1), r};
    const double dev = std::abs(vertex::slab_of_paraboloids(p1, p2).width - distance(p1.v, p2.v));
    t.add(dev <= 1e-12, dev);
  }
  std::size_t decided = 0;
  for (int c = 0; c < 500; ++c) {
    const std::size_t n = 1 + c % 3;
    const double r = rng.uniform(0.1, 2.0);
    const vertex::Paraboloid p1{random_point(rng, n, -1, 1), rng.uniform(-1, 1), r};
    const vertex::Paraboloid p2{random_point(rng, n, -1, 1), rng.uniform(-1, 1), r};
    const Point y = random_point(rng, n, -2, 2);
    const auto s = vertex::slab_of_paraboloids(p1, p2);
    const double margin = dot(s.e, sub(y, p1.v)) - r * s.m;
    if (std::abs(margin) <= 1e-6) {
      t.add(true, 0.0);
      continue;
    }
    ++decided;
    const bool expected = margin < 0.0;
    t.add(vertex::tangent_supports_both(p1, p2, y) == expected, expected ? 0.0 : 1.0);
  }
  rep.note = "width deviation threshold 1e-12; " + std::to_string(decided) + " of 500 probes outside the 1e-6 margin";
}

// 6. Contraction of the vertex map at N ~ 1e4.
void contraction(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  std::size_t total = 0;
  const auto d = GridDomain::line(-1, 1, 10001);
  for (int c = 0; c < 50; ++c) {
    const auto f = corpus::gen_max_quadratics(rng.next(), d, 1 + rng.next() % 4, 0.2, 3.0);
    const double r = rng.uniform(0.2, 1.0) / max_curvature(f);
    const auto u = corpus::rasterize(f, d);
    try {
      const auto pairs = vertex::vertex_map(u, full_region(d), r);
      total += pairs.size();
      if (pairs.size() < 2) {
        t.add(true, 0.0);
        continue;
      }
      const double dev = vertex::contraction_defect(d, pairs) / 2.0;  // scaled by the diameter
      t.add(dev <= 1e-8, dev);
    } catch (const ConsistencyError&) {
      t.fail();
    }
  }
  rep.note = "defect scaled by the domain diameter, threshold 1e-8; " + std::to_string(total) + " contact pairs";
}

// (8.1)' functions: maxima of centred quadratics with curvature in (0, 1/R).
GridFunction growth_function(Rng& rng, const GridDomain& d, double R) {
  const std::size_t n = d.dim();
  std::vector<QuadPiece> pieces;
  const std::size_t k = 1 + rng.next() % 3;
  for (std::size_t i = 0; i < k; ++i) {
    const Point eig = random_point(rng, n, 0.05 / R, 0.8 / R);
    pieces.push_back(QuadPiece{Point(n, 0.0), Point(n, 0.0), 0.0, rotated(rng, eig)});
  }
  return corpus::rasterize(OracleFunction(pieces), d);
}

double chain_violation(const vertex::MeasureChain& mc) {
  return std::max({0.0, mc.lhs - mc.mid, mc.mid - mc.rhs});
}

// 7. Coverage of the target ball and the measure chain.
void coverage(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  const double rho = 1.0, r = 0.25, R = 1.0;
  for (std::size_t n : {1u, 2u}) {
    const auto d = n == 1 ? GridDomain::line(-1.5, 1.5, 301) : GridDomain::cube(2, -1.2, 1.2, 49);
    const double h = d.spacing(0);
    const auto u = add_isotropic_quadratic(GridFunction(d, std::vector<double>(d.size(), 0.0)), 0.5, Point(n, 0.0));
    const auto cov = vertex::coverage_check(u, Point(n, 0.0), rho, r, R);
    std::size_t missed = 0;
    for (std::size_t k = 0; k < cov.probes.size(); ++k)
      if (norm(cov.probes[k]) <= 0.5 - h && !(cov.attained[k] && cov.contained[k])) ++missed;
    t.add(missed == 0, static_cast<double>(missed));
    const auto mc = vertex::measure_chain(u, Point(n, 0.0), rho, r, R);
    const double v = chain_violation(mc);
    t.add(v <= 4 * h, v / h);
  }
  double worst_growth = 0.0;
  for (int c = 0; c < 20; ++c) {
    const std::size_t n = 1 + c % 2;
    const std::uint64_t s = rng.next();
    double prev = 0.0;
    bool ok = true;
    for (int level = 0; level < 2; ++level) {
      const std::size_t N = n == 1 ? (level == 0 ? 121 : 241) : (level == 0 ? 49 : 97);
      const auto d = GridDomain::cube(n, -1.2, 1.2, N);
      Rng local(s);
      const auto u = growth_function(local, d, R);
      const auto mc = vertex::measure_chain(u, Point(n, 0.0), rho, r, R);
      const double v = chain_violation(mc);
      ok = ok && v <= 4 * mc.h;
      if (level == 1) {
        ok = ok && v <= prev + 1e-12;
        worst_growth = std::max(worst_growth, v - prev);
      }
      prev = v;
    }
    t.add(ok, worst_growth);
  }
  rep.note = "chain slack limit 4h; missed probes in B(0, 0.5 - h) must be 0";
}

// 8. Jensen's contact set of w equals Slodkowski's of the translated u.
void jensen_slodkowski(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 1 + c % 2;
    const auto d = n == 1 ? GridDomain::line(-1, 1, 201) : GridDomain::cube(2, -1, 1, 41);
    const auto f = corpus::gen_max_quadratics(rng.next(), d, 3, -2.0, 1.0);
    const auto w = corpus::rasterize(f, d);
    const double lambda = f.declared_modulus() + rng.uniform(0.0, 1.0);
    const Point x = d.node(random_node_in(rng, d, -0.4, 0.4));
    const auto ball = region_ball(d, x, 0.5);
    const auto cw = contact::global_contact_set(w, ball, SymMatrix(n));
    const auto cu = contact::global_contact_set(contact::jensen_to_slodkowski(w, x, lambda), ball,
                                                SymMatrix::identity(n, lambda));
    std::size_t diff = 0;
    for (auto i : ball.members()) diff += cw.members.contains(i) != cu.members.contains(i);
    t.add(diff == 0, static_cast<double>(diff));
  }
  rep.note = "defect = nodes whose membership differs, threshold 0";
}

// 9. Contact sets of strict jets have positive measure on shrinking balls.
void positivity(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  std::size_t retries = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = c < 35 ? 1 : 2;
    const auto d = n == 1 ? GridDomain::line(-1, 1, 2001) : GridDomain::cube(2, -1, 1, 81);
    const auto f = corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 2.0);
    const auto u = corpus::rasterize(f, d);
    std::optional<contact::Jet> jet;
    double rho_bar = 0.0;
    for (int attempt = 0; attempt < 50 && !jet; ++attempt) {
      const std::size_t x0 = random_node_in(rng, d, -0.4, 0.4);
      const Point x = d.node(x0);
      const auto oj = corpus::oracle_jet(f, x);
      if (!oj.gradient) {
        ++retries;
        continue;
      }
      contact::Jet cand{x, u[x0], *oj.gradient, *oj.hessian + SymMatrix::identity(n, 1.0)};
      for (double rho = 0.5; rho > 0.01; rho *= 0.5)
        if (contact::is_upper_contact_jet(u, cand, rho, true)) {
          rho_bar = rho;
          jet = cand;
          break;
        }
      if (!jet) ++retries;
    }
    if (!jet) {
      t.fail();
      continue;
    }
    bool ok = true;
    double smallest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5; ++k) {
      const auto ball = region_ball(d, jet->x, rho_bar * std::ldexp(1.0, -k));
      const auto cs = contact::global_contact_set(u, ball, jet->A);
      const double m = cell_measure(cs.members);
      smallest = std::min(smallest, m);
      ok = ok && !cs.members.empty() && m > 0.0;
    }
    t.add(ok, ok ? 0.0 : 1.0);
    (void)smallest;
  }
  rep.note = "5 balls per jet, all contact sets non-empty; " + std::to_string(retries) + " jet points redrawn";
}

// 10. Upper contact jet approximation stays within the sandwich bounds.
void jets(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  const double rho0 = 0.3;
  std::size_t samples = 0;
  for (int c = 0; c < 30; ++c) {
    const std::size_t n = c < 20 ? 1 : 2;
    const auto d = n == 1 ? GridDomain::line(-2, 2, 801) : GridDomain::cube(2, -1, 1, 81);
    const double h = d.spacing(0);
    std::vector<std::size_t> inner;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.is_interior(i)) inner.push_back(i);
    const IndexRegion E(d, inner);

    std::optional<OracleFunction> f;
    std::size_t x0 = 0;
    int piece = -1;
    for (int attempt = 0; attempt < 200 && piece < 0; ++attempt) {
      if (attempt % 20 == 0) f = corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 2.0);
      x0 = random_node_in(rng, d, n == 1 ? -1.0 : -0.4, n == 1 ? 1.0 : 0.4);
      piece = active_piece(*f, d.node(x0));
      // The whole jet ball must sit on the same piece.
      const auto ball = region_ball(d, d.node(x0), rho0);
      for (auto j : ball.members())
        if (piece >= 0 && active_piece(*f, d.node(j)) != piece) piece = -1;
    }
    if (piece < 0) {
      t.fail();
      continue;
    }
    const auto u = corpus::rasterize(*f, d);
    const Point x = d.node(x0);
    const auto& q = f->pieces()[static_cast<std::size_t>(piece)];
    const double delta = c % 3 == 0 ? 0.0 : rng.uniform(0.0, 0.5);
    const contact::Jet jet0{x, u[x0], q.gradient(x), q.curvature + SymMatrix::identity(n, delta)};
    const double lambda = f->declared_modulus();
    const auto res = contact::jet_approximation(u, jet0, E, contact::default_eps_schedule(0.2, 5), lambda, rho0);
    const double top = jet0.A.max_eigenvalue();
    const double C = 1.0 + std::max(std::abs(top), std::abs(jet0.A.min_eigenvalue())) + lambda;
    bool ok = !res.samples.empty();
    double worst = 0.0;
    for (const auto& s : res.samples) {
      const double dp = distance(s.p, jet0.p);
      worst = std::max(worst, dp / (C * (h + s.eps)));
      const auto ev = s.A.eigenvalues();
      ok = ok && dp <= C * (h + s.eps) && ev.front() >= -lambda - 1e-6 && ev.back() <= top + s.eps + 1e-6;
    }
    samples += res.samples.size();
    t.add(ok, worst);
  }
  rep.note = std::to_string(samples) + " samples; defect = |p_j - p0| / (C (h + eps_j)), threshold 1";
}

// 11. Second-order Taylor statistic over the grid.
void alexandrov_suite(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  {
    const auto d = GridDomain::line(-2, 2, 401);
    const auto q = corpus::rasterize(corpus::single_quadratic(Point{0.0}, SymMatrix(1, {1.0})), d);
    const double h = q.domain().spacing(0);
    const double fr = alexandrov::alexandrov_statistic(q, 0.0, 1e-6, {h, 2 * h}).fraction();
    t.add(fr == 1.0, 1.0 - fr);
  }
  std::string ratios;
  // Every failing node must lie within the Taylor radius 2h of a kink of the oracle,
  // and each kink may cost at most four nodes. The double well must reach 0.98.
  std::size_t kinks_seen = 0;
  for (int c = 0; c < 9; ++c) {
    std::optional<OracleFunction> f;
    double lambda = 0.0;
    if (c == 0) {
      const SymMatrix one(1, {1.0});
      f = OracleFunction({QuadPiece{{1.0}, {0.0}, 0.0, one}, QuadPiece{{-1.0}, {0.0}, 0.0, one}});
    } else {
      f = corpus::gen_max_quadratics(rng.next(), GridDomain::line(-2, 2, 3), c < 6 ? 2 : 5, -1.0, 2.0);
      lambda = f->declared_modulus();
    }
    std::vector<double> kinks;
    const auto probe = GridDomain::line(-2, 2, 40001);
    int last = -1;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const int p = active_piece(*f, probe.node(i));
      if (p < 0) continue;
      if (last >= 0 && p != last) kinks.push_back(probe.coord(i, 0) - 0.5 * probe.spacing(0));
      last = p;
    }
    kinks_seen += kinks.size();
    const auto coarse = corpus::rasterize(*f, GridDomain::line(-2, 2, 401));
    const auto fine = corpus::rasterize(*f, GridDomain::line(-2, 2, 801));
    const double h = coarse.domain().spacing(0);
    const auto a = alexandrov::alexandrov_statistic(coarse, lambda, 1e-6, {h, 2 * h});
    const auto b = alexandrov::alexandrov_statistic(fine, lambda, 1e-6, {h / 2, h});
    bool ok = a.failing.size() <= 4 * kinks.size() && b.failing.size() <= 4 * kinks.size();
    for (auto i : a.failing) {
      const double x = coarse.domain().coord(i, 0);
      ok = ok && std::any_of(kinks.begin(), kinks.end(),
                             [&](double k) { return std::abs(x - k) <= 2 * h + probe.spacing(0); });
    }
    if (c == 0) ok = ok && a.fraction() >= 0.98 && b.fraction() >= 0.98;
    double ratio = 0.0;
    if (!a.failing.empty()) {
      ratio = b.failing.empty() ? 0.0 : (1.0 - a.fraction()) / (1.0 - b.fraction());
      ok = ok && ratio >= 1.5 && ratio <= 3.0;
    }
    ratios += (ratios.empty() ? "" : " ") + fmt(ratio);
    t.add(ok, 1.0 - a.fraction());
  }
  rep.note = std::to_string(kinks_seen) + " kinks; failing-fraction ratios when h halves (0 = no failures): " + ratios;
}

// 12. The maps of the Legendre construction.
void legendre_maps(Rng& rng, VerifyReport& rep) {
  Tally t{rep};
  double worst_exp = -std::numeric_limits<double>::infinity(), worst_g = 0.0, worst_ridge = 0.0;
  std::size_t validated = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 1 + c % 2;
    const auto d = n == 1 ? GridDomain::line(-1, 1, 201) : GridDomain::cube(2, -1, 1, 21);
    const double h = d.spacing(0);
    // In 2-D a kink ridge lets the nodal prox slide O(sqrt h) along it, so the 2h bound
    // is enforced on smooth data there and only reported for kinked data.
    const bool smooth = n == 2 && c % 4 == 1;
    const auto fo = corpus::gen_max_quadratics(rng.next(), d, smooth ? 1 : 3, 0.0, 2.0);
    const auto u = corpus::rasterize(fo, d);
    // Rounding G to nodes costs sqrt(1 + r kappa) h sqrt(n) / 2 per point; keep r kappa <= 1.
    const double r = rng.uniform(0.2, 1.0) / std::max(1.0, max_curvature(fo));
    const auto dual = n == 1 ? legendre::DualGrid{GridDomain::line(-1.5, 1.5, 61)}
                             : legendre::DualGrid{GridDomain::cube(2, -1.5, 1.5, 15)};
    const auto G = alexandrov::gradient_inverse_G(u, r, dual);
    const double gd = alexandrov::g_contraction_defect(d, dual, G);
    bool ok = true;
    if (n == 1 || smooth) {
      worst_g = std::max(worst_g, gd / h);
      ok = gd <= 2 * h;
    } else {
      worst_ridge = std::max(worst_ridge, gd / h);
    }

    // Slopes come from the oracle so that strong convexity is exact; the grid only validates them.
    const auto f = alexandrov::strongly_convex_lift(u, r);
    std::vector<alexandrov::SlopePair> sp;
    for (int k = 0; k < 30; ++k) {
      const std::size_t x = rng.next() % d.size();
      const auto jet = corpus::oracle_jet(fo, d.node(x));
      if (!jet.gradient) continue;
      Point y = d.node(x);
      for (std::size_t i = 0; i < n; ++i) y[i] += r * (*jet.gradient)[i];
      if (convex::subdifferential_contains(f, x, y)) sp.push_back({x, y});
    }
    std::vector<std::pair<alexandrov::SlopePair, alexandrov::SlopePair>> pairs;
    for (std::size_t a = 0; a < sp.size(); ++a)
      for (std::size_t b = a + 1; b < sp.size(); ++b) pairs.emplace_back(sp[a], sp[b]);
    validated += pairs.size();
    if (!pairs.empty()) {
      const double e = alexandrov::expansive_defect(f, pairs);
      worst_exp = std::max(worst_exp, e);
      ok = ok && e <= 1e-9;
    }
    t.add(ok, n == 1 || smooth ? gd / h : 0.0);
  }
  {
    const auto d = GridDomain::line(-2, 2, 401);
    const double h = d.spacing(0);
    std::vector<double> q(d.size()), a(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      q[i] = 0.5 * d.coord(i, 0) * d.coord(i, 0);
      a[i] = std::abs(d.coord(i, 0));
    }
    const legendre::DualGrid dual{GridDomain::line(-4, 4, 401)};
    const auto hq = alexandrov::hessian_via_G(GridFunction(d, q), 1.0, dual, Point{0.0}, {4 * h, 8 * h});
    const double dev = hq.A ? std::abs((*hq.A)(0, 0) - 2.0) : 1.0;
    t.add(hq.A && dev <= 1e-6, dev);
    const auto ha = alexandrov::hessian_via_G(GridFunction(d, a), 1.0, dual, Point{0.0});
    t.add(!ha.A, ha.A ? 1.0 : 0.0);
  }
  rep.note = "G contraction defect / h max " + fmt(worst_g) + " (limit 2; kinked 2-D data, not enforced: " +
             fmt(worst_ridge) + "); expansive defect max " + fmt(worst_exp) +
             " over " + std::to_string(validated) + " validated pairs (limit 1e-9)";
}

using SuiteFn = void (*)(Rng&, VerifyReport&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"conjugate_oracle", conjugate_oracle},   {"involution", involution},
      {"subdifferential", subdifferential},     {"shift_lemma", shift_lemma},
      {"slab", slab},                           {"contraction", contraction},
      {"coverage", coverage},                   {"jensen_slodkowski", jensen_slodkowski},
      {"positivity", positivity},               {"jets", jets},
      {"alexandrov", alexandrov_suite},         {"legendre_maps", legendre_maps},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

VerifyReport run_suite(const std::string& name, std::uint64_t seed) {
  const auto& r = registry();
  const auto it = std::find_if(r.begin(), r.end(), [&](const auto& e) { return e.first == name; });
  if (it == r.end()) throw DomainError("unknown suite: " + name);
  VerifyReport rep;
  rep.suite = name;
  rep.seed = seed;
  // Each suite draws from its own stream so suites can run alone with the same results.
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(it - r.begin()) + 1);
  const auto t0 = std::chrono::steady_clock::now();
  it->second(rng, rep);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace qcvx::verify
