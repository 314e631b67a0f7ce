#pragma once

// Deterministic test functions with analytic derivative data: pointwise maxima
// of quadratic pieces.

#include <cstdint>
#include <optional>

#include "qcvx/grid.hpp"

namespace qcvx::corpus {

/// const + <linear, x - center> + 1/2 <curvature (x - center), x - center>
struct QuadPiece {
  Point center;
  Point linear;
  double constant = 0.0;
  SymMatrix curvature;

  double value(std::span<const double> x) const;
  Point gradient(std::span<const double> x) const;
};

class OracleFunction {
 public:
  /// declared_modulus defaults to max(0, -smallest curvature eigenvalue).
  explicit OracleFunction(std::vector<QuadPiece> pieces,
                          std::optional<double> declared_modulus = std::nullopt);

  std::size_t dim() const { return pieces_.front().center.size(); }
  const std::vector<QuadPiece>& pieces() const { return pieces_; }
  double declared_modulus() const { return modulus_; }
  double value(std::span<const double> x) const;

 private:
  std::vector<QuadPiece> pieces_;
  double modulus_ = 0.0;
};

/// Pieces within this gap of the maximum count as active.
inline double activity_tolerance(double value) { return 1e-9 * (1.0 + std::abs(value)); }

struct OracleJet {
  double value = 0.0;
  std::optional<Point> gradient;
  std::optional<SymMatrix> hessian;
  std::size_t active_pieces = 0;
};

OracleJet oracle_jet(const OracleFunction& f, std::span<const double> x);

/// SplitMix64. Every draw is one call to next(); uniform() maps the top 53 bits to [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Draw order per piece: center (n), linear (n, in [-1,1]), constant (1, in
/// [-1/2,1/2]), eigenvalues (n, in [lo,hi]), rotation seed matrix (n*n, in
/// [-1,1], row-major, orthonormalized by modified Gram-Schmidt on columns).
OracleFunction gen_max_quadratics(std::uint64_t seed, const GridDomain& domain, std::size_t pieces,
                                  double curvature_lo, double curvature_hi);

GridFunction rasterize(const OracleFunction& f, const GridDomain& domain);

// Handy fixed members of the corpus.
OracleFunction single_quadratic(std::span<const double> center, const SymMatrix& curvature,
                                double constant = 0.0, Point linear = {});
/// max over x -> s * <a_i, x> for the given slopes (1-D: max(x, -x) = |x|).
OracleFunction max_affine_1d(std::span<const double> slopes);

}  // namespace qcvx::corpus
