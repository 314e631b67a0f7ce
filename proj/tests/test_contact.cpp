#include "doctest.h"

#include <cmath>

#include "qcvx/contact.hpp"
#include "qcvx/convex.hpp"
#include "qcvx/corpus.hpp"

using namespace qcvx;
using namespace qcvx::contact;

namespace {

GridFunction on_line(double lo, double hi, std::size_t n, double (*fn)(double)) {
  const auto d = GridDomain::line(lo, hi, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = fn(d.coord(i, 0));
  return GridFunction(d, v);
}

Jet jet1(double x, double value, double p, double a) { return Jet{{x}, value, {p}, SymMatrix(1, {a})}; }

// Independent 1-D oracle: x is a contact point iff the slope interval of
// F = a y^2/2 - u over the region is non-empty (with slack tol).
std::vector<std::size_t> brute_members_1d(const GridFunction& u, const IndexRegion& region, double a, double tol) {
  const auto& d = u.domain();
  std::vector<std::size_t> out;
  for (auto x : region.members()) {
    bool ok = false;
    // Candidate slopes: all chords through x, plus their midpoints.
    std::vector<double> cands;
    for (auto y : region.members())
      if (y != x) cands.push_back((u[y] - u[x]) / (d.coord(y, 0) - d.coord(x, 0)) - 0.5 * a * (d.coord(y, 0) - d.coord(x, 0)));
    if (cands.empty()) cands.push_back(0.0);
    for (double p : cands) {
      double worst = -1e300;
      for (auto y : region.members()) {
        const double dy = d.coord(y, 0) - d.coord(x, 0);
        worst = std::max(worst, u[y] - u[x] - p * dy - 0.5 * a * dy * dy);
      }
      if (worst <= tol) {
        ok = true;
        break;
      }
    }
    if (ok) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("upper contact jets") {
  const auto q = on_line(-1, 1, 41, [](double x) { return 0.5 * x * x; });
  CHECK(is_upper_contact_jet(q, jet1(0, 0, 0, 2), 0.5, true));
  CHECK_FALSE(is_upper_contact_jet(q, jet1(0, 0, 0, 1), 0.5, true));
  CHECK(is_upper_contact_jet(q, jet1(0, 0, 0, 1), 0.5, false));
  const auto a = on_line(-1, 1, 41, [](double x) { return std::abs(x); });
  CHECK_FALSE(is_upper_contact_jet(a, jet1(0, 0, 1, 10), 0.5, false));
  CHECK_THROWS_AS(is_upper_contact_jet(a, jet1(5, 0, 0, 0), 0.1, false), DomainError);
}

TEST_CASE("global contact set examples") {
  const auto q = on_line(-2, 2, 41, [](double x) { return 0.5 * x * x; });
  const auto full = full_region(q.domain());
  const auto all = global_contact_set(q, full, SymMatrix(1, {1.0}));
  CHECK(all.members.size() == 41);
  for (std::size_t t = 0; t < all.members.size(); ++t)
    CHECK(all.witnesses[t][0] == doctest::Approx(q.domain().coord(all.members.members()[t], 0)));

  const auto ends = global_contact_set(q, full, SymMatrix(1, {0.0}));
  REQUIRE(ends.members.size() == 2);
  CHECK(ends.members.members()[0] == 0);
  CHECK(ends.members.members()[1] == 40);
  CHECK(ends.witnesses[0][0] == 0.0);
  CHECK(ends.witnesses[1][0] == 0.0);
  CHECK(brute_members_1d(q, full, 0.0, 1e-9) == ends.members.members());

  const auto zero = on_line(-2, 2, 41, [](double) { return 0.0; });
  const auto z = global_contact_set(zero, full, SymMatrix(1, {0.0}));
  CHECK(z.members.size() == 41);
  for (const auto& p : z.witnesses) CHECK(p[0] == 0.0);
  CHECK(z.measure() == doctest::Approx(41 * 0.1));
}

TEST_CASE("contact sets match the brute-force oracle on random 1-D data") {
  corpus::Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = GridDomain::line(-1, 1, 41);
    const auto f = corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 2.0);
    const auto u = corpus::rasterize(f, d);
    const double a = rng.uniform(-1, 3);
    const auto region = region_ball(d, Point{rng.uniform(-0.3, 0.3)}, 0.6);
    const auto cs = global_contact_set(u, region, SymMatrix(1, {a}));
    CHECK(cs.members.members() == brute_members_1d(u, region, a, 1e-9));
    for (std::size_t t = 0; t < cs.members.size(); ++t)
      CHECK(contact_violation(u, region, SymMatrix(1, {a}), cs.members.members()[t], cs.witnesses[t]) <= 1e-8);
  }
}

TEST_CASE("contact sets in 2-D are validated and shift invariant") {
  corpus::Rng rng(4);
  const auto d = GridDomain::cube(2, -1, 1, 21);
  for (int rep = 0; rep < 5; ++rep) {
    const auto u = corpus::rasterize(corpus::gen_max_quadratics(rng.next(), d, 3, -1.0, 1.0), d);
    const SymMatrix A = SymMatrix::identity(2, rng.uniform(0.5, 2.0));
    const auto region = region_ball(d, Point{0.0, 0.0}, 0.8);
    const auto cs = global_contact_set(u, region, A);
    CHECK_FALSE(cs.members.empty());
    convex::QuadraticPolynomial phi{rng.uniform(-1, 1), {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                    SymMatrix(2, {rng.uniform(0, 1), rng.uniform(-0.2, 0.2), rng.uniform(0, 1)})};
    const auto cs2 = global_contact_set(convex::shift_by_quadratic(u, phi), region, A + phi.P);
    CHECK(cs2.members.members() == cs.members.members());
  }
}

TEST_CASE("radius contact") {
  const auto d = GridDomain::line(-2, 2, 41);
  const auto zero = on_line(-2, 2, 41, [](double) { return 0.0; });
  const auto rc0 = radius_contact(zero, full_region(d), Point{0.0}, 1.0);
  CHECK(rc0.c_hat == 0.0);
  REQUIRE(rc0.contacts.size() == 1);
  CHECK(d.coord(rc0.contacts.members()[0], 0) == doctest::Approx(0.0));

  const auto lin = on_line(-2, 2, 41, [](double x) { return x; });
  const auto rc = radius_contact(lin, full_region(d), Point{0.0}, 1.0);
  CHECK(rc.c_hat == doctest::Approx(0.5));
  REQUIRE(rc.contacts.size() == 1);
  const double x = d.coord(rc.contacts.members()[0], 0);
  CHECK(x == doctest::Approx(1.0));
  CHECK(std::abs(x) <= std::sqrt(2.0 * 1.0 * oscillation(lin, full_region(d))));
  const auto para = sample_quadratic(d, rc.c_hat, Point{0.0}, 1.0);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(lin[i] <= para[i] + 1e-12);
}

TEST_CASE("interior contact region") {
  const auto d = GridDomain::line(-1, 1, 21);
  const auto zero = GridFunction(d, std::vector<double>(21, 0.0));
  CHECK(interior_contact_region(zero, full_region(d), 1.0).size() == 19);

  const auto u = on_line(-2, 2, 401, [](double x) { return x * x / 8; });
  CHECK(contact_radius_bound(u, full_region(u.domain()), 0.5) == doctest::Approx(std::sqrt(0.5)));
  const auto xd = interior_contact_region(u, full_region(u.domain()), 0.5);
  for (auto i : xd.members()) CHECK(std::abs(u.domain().coord(i, 0)) < 2 - std::sqrt(0.5));
  CHECK(xd.size() == 259);  // |x| <= 1.29 at spacing 0.01

  const auto q = on_line(-2, 2, 41, [](double x) { return 0.5 * x * x; });
  CHECK(interior_contact_region(q, full_region(q.domain()), 4.0).empty());
}

TEST_CASE("jensen to slodkowski translation") {
  const auto w = on_line(-1, 1, 41, [](double x) { return -x * x; });
  const auto u = jensen_to_slodkowski(w, Point{0.0}, 4.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(w.domain().coord(i, 0) * w.domain().coord(i, 0)));
  CHECK(convex::is_convex(u));
  const auto ball = region_ball(w.domain(), Point{0.0}, 1.0);
  const auto cw = global_contact_set(w, ball, SymMatrix(1, {0.0}));
  const auto cu = global_contact_set(u, ball, SymMatrix(1, {4.0}));
  CHECK(cw.members.size() == 41);
  CHECK(cw.members.members() == cu.members.members());
  CHECK(jensen_to_slodkowski(w, Point{0.3}, 0.0).values() == w.values());
  CHECK_THROWS_AS(jensen_to_slodkowski(w, Point{0.0}, -1.0), DomainError);
}

TEST_CASE("jet approximation") {
  const auto d = GridDomain::line(-2, 2, 801);
  std::vector<std::size_t> inner;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) inner.push_back(i);
  const IndexRegion E(d, inner);

  const auto u = on_line(-2, 2, 801, [](double x) { return std::max(0.5 * (x - 1) * (x - 1), 0.5 * (x + 1) * (x + 1)); });
  const auto res = jet_approximation(u, jet1(0.5, u[*d.find_node(Point{0.5})], 1.5, 2.0), E,
                                     default_eps_schedule(0.2, 5), 0.0, 0.5);
  REQUIRE(res.samples.size() == 5);
  for (const auto& s : res.samples) {
    CHECK(std::abs(s.p[0] - 1.5) <= 0.01 + s.eps);
    CHECK(s.A(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  }

  const auto q = on_line(-2, 2, 801, [](double x) { return 0.5 * x * x; });
  const auto rq = jet_approximation(q, jet1(0, 0, 0, 1), E, default_eps_schedule(0.1, 12), 0.0, 1.0);
  CHECK(rq.resolution_exhausted.has_value());
  for (const auto& s : rq.samples) CHECK(s.A(0, 0) <= 1 + s.eps + 1e-6);

  CHECK_THROWS_AS(jet_approximation(q, jet1(0, 0, 0, 0.5), E, {0.1}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(jet_approximation(q, jet1(0, 0, 0, 1), full_region(d), {0.1}, 0.0, 1.0), DomainError);
}
