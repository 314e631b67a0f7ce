#pragma once

// Upper contact jets and global contact sets of type A.
//
// x is a global upper contact point of type A on X when some p gives
//
//     u(y) <= u(x) + <p, y - x> + 1/2 <A(y - x), y - x>   for all y in X.
//
// With F = q_A - u, q_A(y) = <Ay, y>/2, this says F has the affine minorant
// F(x) + <Ax - p, y - x> on X, i.e. x lies on the convex envelope of F|X. So a
// single envelope computation finds every contact point at once.

#include <optional>

#include "qcvx/grid.hpp"

namespace qcvx::contact {

struct Jet {
  Point x;
  double value = 0.0;
  Point p;
  SymMatrix A;
};

/// Checks u(y) <= value + <p, y-x> + <A(y-x), y-x>/2 at every node within rho
/// of jet.x, with slack tol; strict mode demands margin tol |y-x|^2 off x.
bool is_upper_contact_jet(const GridFunction& u, const Jet& jet, double rho, bool strict, double tol = 1e-9);

struct ContactSet {
  IndexRegion region;
  IndexRegion members;
  SymMatrix type_matrix;
  /// witnesses[k] belongs to members.members()[k].
  std::vector<Point> witnesses;
  /// Largest spacing of the dual grid the envelope used.
  double dual_spacing = 0.0;

  double measure() const { return cell_measure(members); }
};

/// Members are region nodes where the envelope of F = q_A - u over the region
/// is within tol of F (absolute, so the set is unchanged when an affine
/// function is added to u). Every witness is re-checked against the raw
/// inequality over the region; a failure throws ConsistencyError.
ContactSet global_contact_set(const GridFunction& u, const IndexRegion& region, const SymMatrix& A,
                              double tol = 1e-9);

/// Direct O(R^2) check of the contact inequality at x with slope p; returns
/// max over region of u(y) - u(x) - <p, y-x> - <A(y-x), y-x>/2.
double contact_violation(const GridFunction& u, const IndexRegion& region, const SymMatrix& A,
                         std::size_t x, std::span<const double> p);

struct RadiusContact {
  double c_hat = 0.0;
  IndexRegion contacts;
};

/// c_hat = max over region of u(y) - |y-v|^2/(2r); contacts attain it within tol.
RadiusContact radius_contact(const GridFunction& u, const IndexRegion& region, std::span<const double> v,
                             double r, double tol = 1e-9);

/// sqrt(2 r Osc(u, region)).
double contact_radius_bound(const GridFunction& u, const IndexRegion& region, double r);
/// Region members farther than contact_radius_bound from the region's boundary.
IndexRegion interior_contact_region(const GridFunction& u, const IndexRegion& region, double r);

/// w + (lambda/2)|. - x|^2.
GridFunction jensen_to_slodkowski(const GridFunction& w, std::span<const double> x, double lambda);

struct JetSample {
  std::size_t x = 0;
  Point p;
  SymMatrix A;
  double eps = 0.0;
};

struct JetApproximation {
  std::vector<JetSample> samples;
  /// Set when the schedule stopped early because the grid ran out of
  /// resolution; holds the first epsilon that could not be served.
  std::optional<double> resolution_exhausted;
};

/// eps0, eps0/2, eps0/4, ... (count terms).
std::vector<double> default_eps_schedule(double eps0, std::size_t count);

/// For each eps: contact set of type A0 + eps I on the eps-ball around jet0.x
/// within E; the member nearest jet0.x whose stencil lies inside that ball
/// gives the sample (numerical gradient and Hessian). jet0 must be a
/// non-strict upper contact jet at radius rho0, and E may only hold nodes with
/// a valid numerical Hessian; otherwise DomainError.
JetApproximation jet_approximation(const GridFunction& u, const Jet& jet0, const IndexRegion& E,
                                   const std::vector<double>& eps_schedule, double lambda, double rho0);

}  // namespace qcvx::contact
