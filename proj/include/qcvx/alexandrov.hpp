#pragma once

// Proximal maps, the inverse G of the expansive map I + r du, the Legendre
// potential g of f = r u + |x|^2 / 2, and finite-difference second derivatives.

#include <optional>

#include "qcvx/legendre.hpp"

namespace qcvx::alexandrov {

struct ProxResult {
  Point y;
  std::size_t x = 0;  ///< minimizing node
  Point p;            ///< (y - x) / r
  double objective = 0.0;
};

/// Grid minimizer of r u(z) + |z - y|^2 / 2, ties to the smallest linear index.
ProxResult prox(const GridFunction& u, std::span<const double> y, double r);

/// Distance from the box boundary a dual node needs so that its prox
/// minimizer is interior: 2 sqrt(r |u|_inf).
double prox_margin(const GridFunction& u, double r);

/// f = r u + |x|^2 / 2 on u's grid.
GridFunction strongly_convex_lift(const GridFunction& u, double r);

/// G(y) for every dual node, as primal linear indices. Computed from the
/// maximizer of <x,y> - f(x), which is the prox minimizer at y.
std::vector<std::size_t> gradient_inverse_G(const GridFunction& u, double r, const legendre::DualGrid& dual);

/// max over dual pairs of |G(y1) - G(y2)| - |y1 - y2|.
double g_contraction_defect(const GridDomain& primal, const legendre::DualGrid& dual,
                            const std::vector<std::size_t>& G);

struct SlopePair {
  std::size_t x;  ///< primal node
  Point y;        ///< claimed element of the subdifferential of f at x
};

/// max over pairs of |x1 - x2| - |y1 - y2|. Every (x, y) must pass
/// subdifferential_contains(f, x, y, tol); otherwise DomainError naming it.
double expansive_defect(const GridFunction& f, const std::vector<std::pair<SlopePair, SlopePair>>& pairs,
                        double tol = 1e-9);

struct LegendrePotential {
  GridFunction f;
  GridFunction g;
  std::vector<std::size_t> G;
  bool g_convex = false;
  /// max over interior dual nodes of |centred difference of g - G|.
  double gradient_defect = 0.0;
  /// max over dual nodes of |f(G(y)) + g(y) - <G(y), y>|.
  double fenchel_defect = 0.0;
};

LegendrePotential legendre_potential(const GridFunction& u, double r, const legendre::DualGrid& dual);

struct HessianSample {
  std::size_t x = 0;
  SymMatrix H;
  bool valid = false;
  double scale = 0.0;  ///< largest spacing
};

/// Centred second differences with the four-point cross stencil. Valid only
/// when every stencil node exists (no face-adjacent boundary).
HessianSample numerical_hessian(const GridFunction& u, std::size_t x);

/// Gradient from differences restricted to mask nodes: centred when both axis
/// neighbours are in the mask, second-order one-sided when two on one side are,
/// first-order otherwise. Axes with no masked neighbour get 0.
Point numerical_gradient(const GridFunction& u, std::size_t x, const std::vector<char>& mask);
Point numerical_gradient(const GridFunction& u, std::size_t x);

struct AlexandrovResult {
  std::size_t tested = 0;  ///< interior nodes
  std::size_t passed = 0;
  std::vector<std::size_t> failing;
  double fraction() const { return tested ? static_cast<double>(passed) / static_cast<double>(tested) : 0.0; }
};

/// A node passes when its Hessian is valid with eigenvalues >= -lambda - taylor_tol
/// and, for every radius s, the second-order Taylor remainder over the closed
/// s-ball is at most taylor_tol s^2.
AlexandrovResult alexandrov_statistic(const GridFunction& u, double lambda, double taylor_tol,
                                      const std::vector<double>& radii);

struct HessianViaG {
  SymMatrix B;             ///< centred difference of G, symmetrized
  double condition = 0.0;  ///< infinite when B is not positive definite
  std::optional<SymMatrix> A;
  std::size_t x0 = 0;      ///< G(y0)
  /// Per radius s: max over |x - x0| <= s of |f(x) - f(x0) - <y0, x - x0> - <A(x-x0), x-x0>/2| / s^2.
  std::vector<double> remainders;
};

/// y0 must be a dual node with both axis neighbours on every axis. A is
/// withheld when cond(B) > 1e8 or B is not positive definite.
HessianViaG hessian_via_G(const GridFunction& u, double r, const legendre::DualGrid& dual,
                          std::span<const double> y0, const std::vector<double>& radii = {});

}  // namespace qcvx::alexandrov
