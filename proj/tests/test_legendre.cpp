#include "doctest.h"

#include <cmath>
#include <limits>

#include "qcvx/corpus.hpp"
#include "qcvx/legendre.hpp"
#include "qcvx/reference.hpp"

using namespace qcvx;
using legendre::DualGrid;

namespace {

GridFunction sample_1d(const GridDomain& d, double (*fn)(double)) {
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(d.coord(i, 0));
  return GridFunction(d, v);
}

double max_rel_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    w = std::max(w, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return w / (1.0 + s);
}

}  // namespace

TEST_CASE("conjugate of the self-dual quadratic") {
  const auto d = GridDomain::line(-2, 2, 401);
  const auto f = sample_1d(d, [](double x) { return 0.5 * x * x; });
  const auto g = legendre::conjugate(f, DualGrid{GridDomain::line(-2, 2, 401)});
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double y = g.domain().coord(j, 0);
    CHECK(g[j] == doctest::Approx(0.5 * y * y).epsilon(1e-12));
  }
}

TEST_CASE("conjugate of |x| and of an affine function") {
  const auto d = GridDomain::line(-2, 2, 401);
  const auto dual = DualGrid{GridDomain::line(-2, 2, 401)};
  const auto g = legendre::conjugate(sample_1d(d, [](double x) { return std::abs(x); }), dual);
  CHECK(std::abs(g[*dual.grid.find_node(Point{0.5})]) < 1e-12);
  CHECK(g[*dual.grid.find_node(Point{2.0})] == doctest::Approx(2.0));

  const auto ga = legendre::conjugate(sample_1d(d, [](double x) { return x; }), dual);
  for (std::size_t j = 0; j < ga.size(); ++j) {
    const double y = dual.grid.coord(j, 0);
    CHECK(ga[j] == doctest::Approx(2.0 * std::abs(y - 1.0)));
  }
}

TEST_CASE("fast conjugate matches brute force in 1-D, 2-D and 3-D") {
  corpus::Rng rng(7);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const std::size_t N = n == 1 ? 97 : (n == 2 ? 17 : 7);
      const auto d = GridDomain::cube(n, -1.0 - rng.uniform(), 1.0 + rng.uniform(), N);
      std::vector<double> v(d.size());
      for (auto& x : v) x = rng.uniform(-3, 3);
      const GridFunction f(d, v);
      const auto dual = GridDomain::cube(n, -5, 4, N + 3);
      const auto fast = legendre::conjugate(f, DualGrid{dual});
      const auto slow = reference::conjugate(f, dual);
      CHECK(max_rel_dev(fast.values(), slow) <= 1e-12);
    }
  }
}

TEST_CASE("maxplus kernel ties go to the smaller index and -inf is skipped") {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> a = {0.0, 0.0, 0.0, -inf};
  std::vector<double> out(3);
  std::vector<std::int32_t> am(3);
  legendre::maxplus_line(-1.0, 1.0, a, -1.0, 1.0, out, am);
  CHECK(am[0] == 0);  // y=-1: x=-1 wins
  CHECK(am[1] == 0);  // y=0: all tie
  CHECK(am[2] == 2);
  std::vector<double> none = {-inf, -inf};
  std::vector<double> o2(2);
  std::vector<std::int32_t> a2(2);
  legendre::maxplus_line(0.0, 1.0, none, 0.0, 1.0, o2, a2);
  CHECK(o2[0] == -inf);
  CHECK(a2[1] == -1);
}

TEST_CASE("conjugate rejects a dimension mismatch") {
  const auto f = sample_1d(GridDomain::line(-1, 1, 5), [](double x) { return x; });
  CHECK_THROWS_AS(legendre::conjugate(f, DualGrid{GridDomain::cube(2, -1, 1, 3)}), DomainError);
}

TEST_CASE("order reversal and shift rules") {
  corpus::Rng rng(11);
  const auto d = GridDomain::line(-1, 1, 65);
  const auto dual = DualGrid{GridDomain::line(-4, 4, 81)};
  std::vector<double> a(d.size()), b(d.size()), c(d.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform(-1, 1);
    b[i] = a[i] + rng.uniform(0, 1);
    c[i] = a[i] + 0.75;
  }
  const auto ga = legendre::conjugate(GridFunction(d, a), dual);
  const auto gb = legendre::conjugate(GridFunction(d, b), dual);
  const auto gc = legendre::conjugate(GridFunction(d, c), dual);
  for (std::size_t j = 0; j < ga.size(); ++j) {
    CHECK(ga[j] >= gb[j]);
    CHECK(gc[j] == doctest::Approx(ga[j] - 0.75).epsilon(1e-12));
  }

  // f(. - s) on a grid shifted by s: conjugate gains <s, y>.
  const double s = 0.25;
  const auto ds = GridDomain::line(-1 + s, 1 + s, 65);
  const auto gs = legendre::conjugate(GridFunction(ds, a), dual);
  for (std::size_t j = 0; j < ga.size(); ++j)
    CHECK(gs[j] == doctest::Approx(ga[j] + s * dual.grid.coord(j, 0)).epsilon(1e-12));
}

TEST_CASE("biconjugate envelope of the double well matches the hull oracle") {
  const auto d = GridDomain::line(-2, 2, 401);
  const auto f = sample_1d(d, [](double x) { return std::min((x + 1) * (x + 1), (x - 1) * (x - 1)); });
  const auto env = legendre::biconjugate_envelope(f);
  std::vector<double> xs(d.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = d.coord(i, 0);
  const auto hull = reference::lower_hull_values(xs, f.values());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(env[i] - hull[i]) <= 1e-9);
  CHECK(std::abs(env[*d.find_node(Point{0.0})]) <= 1e-9);
  CHECK(env[*d.find_node(Point{1.5})] == doctest::Approx(0.25));
}

TEST_CASE("envelope is below, convex data is fixed, and the map is idempotent") {
  const auto d = GridDomain::line(-2, 2, 201);
  const auto abs = sample_1d(d, [](double x) { return std::abs(x); });
  const auto e1 = legendre::biconjugate_envelope(abs);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(e1[i] - abs[i]) <= 1e-9 * 3);

  corpus::Rng rng(3);
  std::vector<double> v(d.size());
  for (auto& x : v) x = rng.uniform(-1, 1);
  const GridFunction f(d, v);
  const auto env = legendre::biconjugate_envelope(f);
  const auto env2 = legendre::biconjugate_envelope(env);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(env[i] <= f[i] + 1e-9 * (1 + f.sup_norm()));
    CHECK(std::abs(env2[i] - env[i]) <= 1e-9 * (1 + f.sup_norm()));
  }
}

TEST_CASE("envelope in 2-D of a convex quadratic is the quadratic") {
  const auto d = GridDomain::cube(2, -1, 1, 21);
  const auto q = SymMatrix::from_dense(2, std::vector<double>{2.0, 0.5, 0.5, 1.0});
  const auto f = corpus::rasterize(corpus::single_quadratic(Point{0.1, -0.2}, q), d);
  const auto env = legendre::biconjugate_envelope(f);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(env[i] - f[i]) <= 1e-9 * (1 + f.sup_norm()));
}

TEST_CASE("envelope support index is a supporting slope") {
  const auto d = GridDomain::line(-2, 2, 81);
  const auto f = sample_1d(d, [](double x) { return std::abs(x) + 0.1 * x * x; });
  const auto env = legendre::envelope_on(f, full_region(d));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = env.dual.grid.coord(env.support[i], 0);
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(f[j] >= f[i] + s * (d.coord(j, 0) - d.coord(i, 0)) - 1e-9);
  }
}

TEST_CASE("auto dual covers the slope range with an odd node count") {
  const auto d = GridDomain::line(-2, 2, 41);
  const auto f = sample_1d(d, [](double x) { return std::abs(x); });
  const auto dual = legendre::auto_dual(f);
  CHECK(dual.grid.shape()[0] % 2 == 1);
  CHECK(dual.grid.shape()[0] >= 41);
  CHECK(dual.grid.mins()[0] < -1.0);
  CHECK(dual.grid.maxs()[0] > 1.0);
  CHECK(dual.grid.find_node(Point{0.0}).has_value());

  const auto flat = sample_1d(d, [](double) { return 3.0; });
  const auto df = legendre::auto_dual(flat);
  CHECK(df.grid.find_node(Point{0.0}).has_value());
}

TEST_CASE("fenchel gap: Young inequality and equality on the subdifferential") {
  const auto d = GridDomain::line(-2, 2, 41);
  const auto f = sample_1d(d, [](double x) { return 0.5 * x * x; });
  const auto g = sample_1d(GridDomain::line(-2, 2, 41), [](double y) { return 0.5 * y * y; });
  CHECK(std::abs(legendre::fenchel_gap(f, g, Point{1.0}, Point{1.0})) < 1e-12);
  CHECK(legendre::fenchel_gap(f, g, Point{1.0}, Point{0.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(legendre::fenchel_gap(f, g, Point{0.05}, Point{0.0}), DomainError);

  const auto a = sample_1d(d, [](double x) { return std::abs(x); });
  const auto ga = legendre::conjugate(a, DualGrid{GridDomain::line(-2, 2, 41)});
  CHECK(std::abs(legendre::fenchel_gap(a, ga, Point{0.0}, Point{0.5})) < 1e-12);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < ga.size(); ++j)
      CHECK(legendre::fenchel_gap(a, ga, d.node(i), ga.domain().node(j)) >= -1e-9);
}
