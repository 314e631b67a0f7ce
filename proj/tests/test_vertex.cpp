#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qcvx/corpus.hpp"
#include "qcvx/vertex.hpp"

using namespace qcvx;
using namespace qcvx::vertex;

namespace {

GridFunction quadratic_bowl(const GridDomain& d, double a) {
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d.dim(); ++k) s += d.coord(i, k) * d.coord(i, k);
    v[i] = 0.5 * a * s;
  }
  return GridFunction(d, v);
}

}  // namespace

TEST_CASE("vertex of a jet") {
  CHECK(vertex_of_jet(Point{1.0}, Point{2.0}, 0.25)[0] == 0.5);
  CHECK(vertex_of_jet(Point{0.3, 0.4}, Point{0.0, 0.0}, 2.0) == Point{0.3, 0.4});

  // Linear u: the radius contact for vertex v sits at v + r p and inverts.
  const auto d = GridDomain::line(-2, 2, 401);
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * d.coord(i, 0);
  const auto rc = contact::radius_contact(GridFunction(d, v), full_region(d), Point{0.2}, 1.0);
  REQUIRE(rc.contacts.size() == 1);
  const double x = d.coord(rc.contacts.members()[0], 0);
  CHECK(x == doctest::Approx(0.7));
  CHECK(vertex_of_jet(Point{x}, Point{0.5}, 1.0)[0] == doctest::Approx(0.2));
  CHECK_THROWS_AS(vertex_of_jet(Point{0.0}, Point{0.0}, 0.0), DomainError);
}

TEST_CASE("vertex map of quadratics") {
  const auto d = GridDomain::line(-1, 1, 81);
  const double a = 2.0, r = 0.25;
  const auto pairs = vertex_map(quadratic_bowl(d, a), full_region(d), r);
  REQUIRE(pairs.size() == 81);
  for (const auto& p : pairs) CHECK(p.v[0] == doctest::Approx((1 - r * a) * d.coord(p.x, 0)));
  // Every pair shrinks by the factor 1 - ra, so the worst pair is the closest.
  CHECK(contraction_defect(d, pairs) == doctest::Approx(-r * a * d.spacing(0)));

  const auto id = vertex_map(quadratic_bowl(d, 0.0), full_region(d), 1.0);
  for (const auto& p : id) CHECK(p.v[0] == doctest::Approx(d.coord(p.x, 0)));
  CHECK(contraction_defect(d, id) == doctest::Approx(0.0));

  const auto collapse = vertex_map(quadratic_bowl(d, 1.0), full_region(d), 1.0);
  for (const auto& p : collapse) CHECK(std::abs(p.v[0]) <= 1e-12);

  std::vector<double> neg(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) neg[i] = -std::abs(d.coord(i, 0));
  CHECK_THROWS_AS(vertex_map(GridFunction(d, neg), full_region(d), 1.0), DomainError);
}

TEST_CASE("contraction detector") {
  const auto d = GridDomain::line(0, 1, 3);
  CHECK(contraction_defect(d, {{0, {0.0}}, {2, {3.0}}}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(contraction_defect(d, {{0, {0.0}}}), DomainError);
}

TEST_CASE("slab of two paraboloids") {
  const auto s = slab_of_paraboloids({{0, 0}, 0.0, 1.0}, {{1, 0}, 0.5, 1.0});
  CHECK(s.e == Point{1.0, 0.0});
  CHECK(s.m == 0.5);
  CHECK(s.lo == 0.5);
  CHECK(s.hi == 1.5);
  CHECK(s.width == 1.0);

  const auto flat = slab_of_paraboloids({{0.5}, 2.0, 0.3}, {{-1.5}, 2.0, 0.3});
  CHECK(flat.lo == doctest::Approx(-0.5));
  CHECK(flat.hi == doctest::Approx(1.5));

  corpus::Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Paraboloid p1{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1), 0.7};
    const Paraboloid p2{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1), 0.7};
    CHECK(std::abs(slab_of_paraboloids(p1, p2).width - distance(p1.v, p2.v)) <= 1e-12);
  }
  CHECK_THROWS_AS(slab_of_paraboloids({{0.0}, 0, 1}, {{1.0}, 0, 2}), DomainError);
  CHECK_THROWS_AS(slab_of_paraboloids({{0.0}, 0, 1}, {{0.0}, 1, 1}), DomainError);
}

TEST_CASE("common tangent planes") {
  // 1-D, d = 2, c2 = 1: m = 0.5, tangent at a = r m on P1.
  const Paraboloid p1{{0.0}, 0.0, 1.0}, p2{{2.0}, 1.0, 1.0};
  const auto ct = common_tangent(p1, p2, Point{0.0});
  CHECK(ct.z1[0] == doctest::Approx(0.5));
  CHECK(ct.z2[0] == doctest::Approx(2.5));
  CHECK(ct.normal[0] == doctest::Approx(0.5));
  CHECK(ct.normal[1] == -1.0);
  CHECK(std::abs(ct.support_defect) <= 1e-12);

  corpus::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Paraboloid a{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1), 0.4};
    const Paraboloid b{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1), 0.4};
    const auto s = slab_of_paraboloids(a, b);
    const double t = rng.uniform(-2, 2);
    const auto c = common_tangent(a, b, Point{-s.e[1] * t, s.e[0] * t});
    CHECK(std::abs(c.support_defect) <= 1e-9 * (1 + std::abs(a.c) + std::abs(b.c)));
  }
  CHECK_THROWS_AS(common_tangent(p1, p2, Point{1.0}), DomainError);
}

TEST_CASE("tangent plane supports both paraboloids off the slab") {
  const Paraboloid p1{{0.0}, 0.0, 1.0}, p2{{1.0}, 0.5, 1.0};
  CHECK(tangent_supports_both(p1, p2, Point{0.2}));
  CHECK(tangent_support_defect(p1, p2, Point{0.2}) == doctest::Approx(0.3));
  CHECK_FALSE(tangent_supports_both(p1, p2, Point{0.8}));
  CHECK(tangent_supports_both(p1, p2, Point{0.5}));
  CHECK(std::abs(tangent_support_defect(p1, p2, Point{0.5})) <= 1e-15);
}

TEST_CASE("coverage of the target ball by the vertex map") {
  const auto d = GridDomain::line(-1.5, 1.5, 301);
  const auto u = quadratic_bowl(d, 0.5);  // |y|^2 / 4
  const auto rep = coverage_check(u, Point{0.0}, 1.0, 0.25, 1.0);
  CHECK(rep.target_radius == doctest::Approx(0.5));
  CHECK(rep.probes.size() == 99);
  CHECK(rep.failures == 0);

  const auto d2 = GridDomain::cube(2, -1.2, 1.2, 49);
  const auto rep2 = coverage_check(quadratic_bowl(d2, 0.5), Point{0.0, 0.0}, 1.0, 0.25, 1.0);
  CHECK(rep2.failures == 0);

  // r = R: the target ball degenerates to its centre.
  const auto rr = coverage_check(u, Point{0.0}, 1.0, 1.0, 1.0);
  CHECK(rr.probes.size() == 1);
  CHECK(rr.failures == 0);

  // |y|^2 / (2R) itself violates the strict growth bound.
  CHECK_THROWS_AS(coverage_check(quadratic_bowl(d, 1.0), Point{0.0}, 1.0, 0.25, 1.0), DomainError);
  // The zero function satisfies it (0 < |y|^2 / 2R off the centre).
  CHECK_NOTHROW(coverage_check(quadratic_bowl(d, 0.0), Point{0.0}, 1.0, 0.25, 1.0));
}

TEST_CASE("measure chain") {
  double prev_err = 0.0;
  for (std::size_t n : {201u, 401u}) {
    const auto d = GridDomain::line(-1.5, 1.5, n);
    const auto mc = measure_chain(quadratic_bowl(d, 0.5), Point{0.0}, 1.0, 0.25, 1.0);
    CHECK(mc.lhs == doctest::Approx(1.0));
    CHECK(std::abs(mc.rhs - 2.0) <= 2 * mc.h);
    CHECK(mc.lhs <= mc.mid + 4 * mc.h);
    CHECK(mc.mid <= mc.rhs + 4 * mc.h);
    const double err = std::abs(mc.rhs - 2.0);
    if (prev_err > 0) CHECK(err <= prev_err);
    prev_err = err;
  }
  const auto d2 = GridDomain::cube(2, -1.2, 1.2, 49);
  const auto mc2 = measure_chain(quadratic_bowl(d2, 0.5), Point{0.0, 0.0}, 1.0, 0.25, 1.0);
  CHECK(mc2.lhs == doctest::Approx(std::numbers::pi * 0.25));
  CHECK(mc2.lhs <= mc2.mid + 4 * mc2.h);
  CHECK(mc2.mid <= mc2.rhs + 4 * mc2.h);
}

TEST_CASE("1-D contraction defect matches the pairwise oracle") {
  corpus::Rng rng(30);
  const auto d = GridDomain::line(-1, 1, 101);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<VertexPair> pairs;
    for (int k = 0; k < 40; ++k) pairs.push_back({rng.next() % d.size(), {rng.uniform(-1, 1)}});
    double brute = -1e300;
    for (std::size_t a = 0; a < pairs.size(); ++a)
      for (std::size_t b = a + 1; b < pairs.size(); ++b)
        brute = std::max(brute, std::abs(pairs[a].v[0] - pairs[b].v[0]) -
                                    std::abs(d.coord(pairs[a].x, 0) - d.coord(pairs[b].x, 0)));
    CHECK(contraction_defect(d, pairs) == doctest::Approx(brute).epsilon(1e-12));
  }
}
