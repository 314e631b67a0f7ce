#pragma once

// Serial brute-force references. They share no code with the fast kernels and
// exist so tests and the verification suites can check those kernels.

#include <cstdint>

#include "qcvx/grid.hpp"

namespace qcvx::reference {

/// out[j] = max_i (x_i * y_j + a_i), ties to the smallest i. -inf entries of a are skipped.
void maxplus_line(std::span<const double> xs, std::span<const double> a,
                  std::span<const double> ys, std::span<double> out,
                  std::span<std::int32_t> argmax = {});

/// g(y) = max over primal nodes x of (<x,y> - f(x)), O(N M).
std::vector<double> conjugate(const GridFunction& f, const GridDomain& dual);

/// Argmin over nodes of r u(z) + |z - y|^2 / 2, ties to the smallest linear index.
std::size_t prox_index(const GridFunction& u, std::span<const double> y, double r);

/// Lower convex hull of (x_i, v_i), x strictly increasing (Andrew's monotone chain),
/// evaluated back at every x_i by linear interpolation.
std::vector<double> lower_hull_values(std::span<const double> xs, std::span<const double> vs);

}  // namespace qcvx::reference
