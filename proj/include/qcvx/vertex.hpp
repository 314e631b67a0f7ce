#pragma once

// Radius-r paraboloids, the vertex map V = I - r Du on contact points, the
// slab separating two equal-radius paraboloids, and ball coverage by V.

#include "qcvx/contact.hpp"

namespace qcvx::vertex {

/// c + |y - v|^2 / (2r)
struct Paraboloid {
  Point v;
  double c = 0.0;
  double r = 1.0;

  double value(std::span<const double> y) const;
};

/// {y : lo < <e, y> < hi}; m is the slope (c2 - c1) / |v2 - v1|.
struct Slab {
  Point e;
  double m = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double width = 0.0;
};

struct VertexPair {
  std::size_t x;
  Point v;
};

Point vertex_of_jet(std::span<const double> x, std::span<const double> p, double r);

/// (x, x - r p) for every member of the type (1/r)I contact set with witness p.
/// u must be convex on the region. For vertices inside the region's shape the
/// displacement is checked against sqrt(2 r Osc + |h|^2/4) + tol, the grid form
/// of |v - x| <= sqrt(2 r Osc); a failure throws ConsistencyError.
std::vector<VertexPair> vertex_map(const GridFunction& u, const IndexRegion& region, double r, double tol = 1e-9);

/// max over unordered pairs of |v2 - v1| - |x2 - x1|.
double contraction_defect(const GridDomain& domain, const std::vector<VertexPair>& pairs);

Slab slab_of_paraboloids(const Paraboloid& P1, const Paraboloid& P2);

struct CommonTangent {
  Point z1;      ///< (y1, P1(y1)) in R^{n+1}
  Point z2;      ///< (y2, P2(y2))
  Point normal;  ///< ((r m e + w)/r, -1)
  /// min over both graphs of (paraboloid - plane); 0 when the plane supports both.
  double support_defect = 0.0;
};

/// w_bar must be orthogonal to e = (v2 - v1)/|v2 - v1|.
CommonTangent common_tangent(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> w_bar);

/// min over R^n of P2 minus the tangent plane of P1 at y (closed form).
double tangent_support_defect(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> y);
/// tangent_support_defect >= -1e-9 (1 + |c1| + |c2|).
bool tangent_supports_both(const Paraboloid& P1, const Paraboloid& P2, std::span<const double> y);

/// Checks 0 <= u(y) - u(x0) < |y - x0|^2/(2R) on the closed rho-ball (strict
/// by margin tol off x0). x0 must be a node. Throws DomainError naming the
/// first violating node.
void check_growth_condition(const GridFunction& u, std::span<const double> x0, double rho, double R, double tol);

struct CoverageReport {
  double target_radius = 0.0;    ///< rho (1 - sqrt(r/R))
  std::vector<Point> probes;
  std::vector<char> attained;    ///< per probe
  std::vector<char> contained;   ///< per probe: all contacts strictly inside the ball
  std::size_t failures = 0;      ///< probes not attained or not contained
};

/// Probes are grid nodes within target_radius - tol of x0 (x0 alone if none).
/// For each probe v, the radius-r contacts on the rho-ball must lie strictly
/// inside it, and one of them must be a contact point whose vertex is within
/// h/2 of v on every axis.
CoverageReport coverage_check(const GridFunction& u, std::span<const double> x0, double rho, double r, double R,
                              double tol = 1e-9);

struct MeasureChain {
  double lhs = 0.0;  ///< exact volume of the target ball
  double mid = 0.0;  ///< cell measure of nodes within h/2 (per axis) of a vertex image
  double rhs = 0.0;  ///< cell measure of the contact set
  double h = 0.0;    ///< largest spacing
};

MeasureChain measure_chain(const GridFunction& u, std::span<const double> x0, double rho, double r, double R,
                           double tol = 1e-9);

/// Volume of the unit ball in R^n.
double unit_ball_volume(std::size_t n);

}  // namespace qcvx::vertex
