#pragma once

// Subdifferential queries and convexity certificates on grid functions.
//
// Grid convexity has one definition in this library: f agrees with its
// biconjugate envelope up to tol * (1 + |f|_inf). Quasi-convexity uses the
// (lambda/2) convention: u is lambda-quasi-convex iff u + (lambda/2)|x|^2 is
// convex.

#include <optional>

#include "qcvx/legendre.hpp"

namespace qcvx::convex {

struct SubdiffInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Raised by subdifferential_interval_1d on non-convex data. The triple
/// (left, x, right) holds node indices whose chords cross.
class ConvexityViolation : public DomainError {
 public:
  ConvexityViolation(std::size_t left, std::size_t x, std::size_t right);
  std::size_t left, x, right;
};

/// c + <q, y> + 1/2 <P y, y>
struct QuadraticPolynomial {
  double c = 0.0;
  Point q;
  SymMatrix P;

  double value(std::span<const double> y) const;
  Point gradient(std::span<const double> y) const;
};

/// |f - f**|_inf / (1 + |f|_inf).
double convexity_defect(const GridFunction& f);
bool is_convex(const GridFunction& f, double tol = 1e-9);
/// Same criterion with the envelope taken over the region only.
bool is_convex_on(const GridFunction& f, const IndexRegion& region, double tol = 1e-9);

/// Smallest lambda in [0, lambda_max] (to width tol) making u + (lambda/2)|x|^2
/// convex; nullopt when even lambda_max does not.
std::optional<double> quasiconvex_modulus(const GridFunction& u, double lambda_max, double tol = 1e-6);

/// u(x) + <p, y - x> <= u(y) + tol (1 + |u|_inf) at every node y.
bool subdifferential_contains(const GridFunction& u, std::size_t x, std::span<const double> p,
                              double tol = 1e-9);
/// Same, with y ranging over a region only.
bool subdifferential_contains_on(const GridFunction& u, const IndexRegion& region, std::size_t x,
                                 std::span<const double> p, double tol = 1e-9);

/// Chord slope bounds at node x of a 1-D array over the masked nodes:
/// left = max over masked y < x of (f(x) - f(y)) / (x - y) (or -inf),
/// right = min over masked y > x of (f(y) - f(x)) / (y - x) (or +inf).
SubdiffInterval chord_bounds_1d(const GridDomain& domain, std::span<const double> f,
                                const std::vector<char>& mask, std::size_t x);

/// 1-D, interior x. Throws ConvexityViolation if the chord bounds cross.
SubdiffInterval subdifferential_interval_1d(const GridFunction& u, std::size_t x);

/// Dual node minimizing the Fenchel gap at x, returned when that gap is at most
/// 1e-6 (1 + |u|_inf). Ties go to the smallest dual index.
std::optional<Point> subgradient_witness(const GridFunction& u, std::size_t x, const legendre::DualGrid& dual);
/// Same, with a precomputed conjugate g of u on the dual grid.
std::optional<Point> subgradient_witness(const GridFunction& u, const GridFunction& g, std::size_t x);

/// Max over region nodes of the Euclidean norm of the per-axis maximal
/// |chord slope| to the grid neighbours.
double lipschitz_constant(const GridFunction& u, const IndexRegion& region);
/// max over region pairs of |u(y) - u(x)| - C |y - x| (O(R^2); for checking).
double lipschitz_defect(const GridFunction& u, const IndexRegion& region, double C);

struct SubgradientPair {
  std::size_t x;
  Point p;
  std::size_t y;
  Point q;
};

/// min over pairs of <q - p, y - x>. Each (x,p) and (y,q) must pass
/// subdifferential_contains at tol; otherwise DomainError naming the pair.
double monotonicity_defect(const GridFunction& u, const std::vector<SubgradientPair>& pairs,
                           double tol = 1e-9);

GridFunction sample_polynomial(const GridDomain& domain, const QuadraticPolynomial& phi);
/// u + phi, pointwise.
GridFunction shift_by_quadratic(const GridFunction& u, const QuadraticPolynomial& phi);

}  // namespace qcvx::convex
