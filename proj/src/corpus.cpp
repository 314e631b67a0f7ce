#include "qcvx/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcvx::corpus {

double QuadPiece::value(std::span<const double> x) const {
  const Point d = sub(x, center);
  return constant + dot(linear, d) + 0.5 * curvature.quad_form(d);
}

Point QuadPiece::gradient(std::span<const double> x) const {
  Point g = curvature.apply(sub(x, center));
  for (std::size_t k = 0; k < g.size(); ++k) g[k] += linear[k];
  return g;
}

OracleFunction::OracleFunction(std::vector<QuadPiece> pieces, std::optional<double> declared)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("oracle function: needs at least one piece");
  const std::size_t n = pieces_.front().center.size();
  double lowest = 0.0;
  for (const auto& p : pieces_) {
    if (p.center.size() != n || p.linear.size() != n || p.curvature.dim() != n)
      throw DomainError("oracle function: piece dimensions disagree");
    lowest = std::min(lowest, p.curvature.min_eigenvalue());
  }
  const double floor = std::max(0.0, -lowest);
  modulus_ = declared ? *declared : floor;
  if (modulus_ < floor - 1e-12) throw DomainError("oracle function: declared modulus too small");
}

double OracleFunction::value(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) best = std::max(best, p.value(x));
  return best;
}

OracleJet oracle_jet(const OracleFunction& f, std::span<const double> x) {
  OracleJet jet;
  jet.value = f.value(x);
  const double tol = activity_tolerance(jet.value);
  const QuadPiece* active = nullptr;
  for (const auto& p : f.pieces()) {
    if (p.value(x) >= jet.value - tol) {
      ++jet.active_pieces;
      active = &p;
    }
  }
  if (jet.active_pieces == 1) {
    jet.gradient = active->gradient(x);
    jet.hessian = active->curvature;
  }
  return jet;
}

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

// Columns of the returned row-major matrix are orthonormal.
std::vector<double> orthonormal(std::vector<double> a, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += a[r * n + c] * a[r * n + p];
      for (std::size_t r = 0; r < n; ++r) a[r * n + c] -= d * a[r * n + p];
    }
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += a[r * n + c] * a[r * n + c];
    s = std::sqrt(s);
    if (s < 1e-8) {
      // Degenerate draw: fall back to the standard basis vector, re-orthogonalized.
      for (std::size_t r = 0; r < n; ++r) a[r * n + c] = (r == c) ? 1.0 : 0.0;
      for (std::size_t p = 0; p < c; ++p) {
        double d = a[c * n + p];
        for (std::size_t r = 0; r < n; ++r) a[r * n + c] -= d * a[r * n + p];
      }
      s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += a[r * n + c] * a[r * n + c];
      s = std::sqrt(s);
    }
    for (std::size_t r = 0; r < n; ++r) a[r * n + c] /= s;
  }
  return a;
}

}  // namespace

OracleFunction gen_max_quadratics(std::uint64_t seed, const GridDomain& domain, std::size_t pieces,
                                  double lo, double hi) {
  if (pieces == 0) throw DomainError("gen: need at least one piece");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
    throw DomainError("gen: curvature range must be finite with lo <= hi");
  const std::size_t n = domain.dim();
  Rng rng(seed);
  std::vector<QuadPiece> out;
  double lowest = 0.0;
  for (std::size_t p = 0; p < pieces; ++p) {
    QuadPiece q;
    q.center.resize(n);
    q.linear.resize(n);
    for (std::size_t k = 0; k < n; ++k) q.center[k] = rng.uniform(domain.mins()[k], domain.maxs()[k]);
    for (std::size_t k = 0; k < n; ++k) q.linear[k] = rng.uniform(-1.0, 1.0);
    q.constant = rng.uniform(-0.5, 0.5);
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k) {
      eig[k] = rng.uniform(lo, hi);
      lowest = std::min(lowest, eig[k]);
    }
    std::vector<double> seedm(n * n);
    for (double& v : seedm) v = rng.uniform(-1.0, 1.0);
    const auto qm = orthonormal(std::move(seedm), n);
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) dense[i * n + j] += qm[i * n + k] * eig[k] * qm[j * n + k];
    q.curvature = SymMatrix::from_dense(n, dense);
    out.push_back(std::move(q));
  }
  // Declared from the drawn eigenvalues, never below what the assembled matrices imply.
  OracleFunction probe(out);
  return OracleFunction(std::move(out), std::max(-lowest, probe.declared_modulus()));
}

GridFunction rasterize(const OracleFunction& f, const GridDomain& domain) {
  if (domain.dim() != f.dim()) throw DomainError("rasterize: dimension mismatch");
  std::vector<double> vals(domain.size());
#pragma omp parallel
  {
    Point x(domain.dim());
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < domain.size(); ++i) {
      domain.node_into(i, x);
      vals[i] = f.value(x);
    }
  }
  return GridFunction(domain, std::move(vals));
}

OracleFunction single_quadratic(std::span<const double> center, const SymMatrix& curvature,
                                double constant, Point linear) {
  QuadPiece q;
  q.center.assign(center.begin(), center.end());
  q.linear = linear.empty() ? Point(center.size(), 0.0) : std::move(linear);
  q.constant = constant;
  q.curvature = curvature;
  return OracleFunction({q});
}

OracleFunction max_affine_1d(std::span<const double> slopes) {
  std::vector<QuadPiece> ps;
  for (double s : slopes) ps.push_back(QuadPiece{{0.0}, {s}, 0.0, SymMatrix(1)});
  return OracleFunction(std::move(ps));
}

}  // namespace qcvx::corpus
