#pragma once

// Discrete Legendre-Fenchel conjugation and convex envelopes.
//
// The n-D transform factorizes over axes: each sweep replaces one primal axis
// by the corresponding dual axis through a 1-D max-plus transform
//
//     out[j] = max_i (x_i * y_j + a_i),
//
// computed in O(N + M) by marching the upper hull of the points (x_i, a_i).
// Sweeps over independent lines run in parallel; each line's arithmetic is
// self-contained, so results do not depend on the schedule.

#include <cstdint>

#include "qcvx/grid.hpp"

namespace qcvx::legendre {

/// A grid whose nodes are read as slopes.
struct DualGrid {
  GridDomain grid;
};

/// Fast 1-D max-plus transform on uniform abscissae x_i = x0 + i*hx and
/// y_j = y0 + j*hy. Entries of a equal to -inf are excluded. Ties in the
/// maximizer go to the smaller i. An all-excluded line yields -inf, argmax -1.
void maxplus_line(double x0, double hx, std::span<const double> a, double y0, double hy,
                  std::span<double> out, std::span<std::int32_t> argmax = {});

/// Per-sweep maximizer tables, kept when the caller needs witnesses.
using SweepArgmax = std::vector<std::vector<std::int32_t>>;

/// g(y) = max over primal nodes with finite f of (<x,y> - f(x)). Nodes with
/// f = +inf are excluded (the value array may hold +inf, unlike GridFunction).
std::vector<double> conjugate_values(const GridDomain& primal, std::span<const double> f,
                                     const GridDomain& dual, SweepArgmax* argmax = nullptr);

/// Primal linear index attaining the final maximum at each output node.
std::vector<std::size_t> backtrace(const GridDomain& primal, const GridDomain& dual,
                                   const SweepArgmax& argmax);

GridFunction conjugate(const GridFunction& f, const DualGrid& dual);

/// Per axis: the range of forward-difference slopes between adjacent nodes of
/// the mask, padded by one dual spacing. The node count is at least the primal
/// count and odd (so symmetric slope ranges put a node on their midpoint). It
/// is raised until the spacing resolves the smallest slope jump: between
/// lower-hull edges in 1-D (up to max(16 N, 2^20) nodes), or half the smallest
/// second difference along the axis in n-D (up to max(4 N, 2^11) for n = 2,
/// max(2 N, 2^(22/n)) beyond).
DualGrid auto_dual(const GridDomain& primal, std::span<const double> f, const std::vector<char>& mask);
DualGrid auto_dual(const GridFunction& f);

/// Convex envelope of f restricted to a region, evaluated at every primal node,
/// as the max of the supporting lines found by double conjugation. In 1-D the
/// envelope is exact between resolved hull vertices (edges are interpolated);
/// in n-D it is exact at resolved vertices and may sit slightly low on faces.
struct Envelope {
  DualGrid dual;
  std::vector<double> values;
  /// Dual linear index of the supporting slope found at each primal node.
  std::vector<std::size_t> support;
  /// 2-D only: exact supporting slope for nodes the dual grid missed (empty
  /// point elsewhere). Such nodes carry value f(x).
  std::vector<Point> exact;
};

Envelope envelope_on(const GridDomain& primal, std::span<const double> f, const std::vector<char>& mask);
Envelope envelope_on(const GridFunction& f, const IndexRegion& region);

/// f** on f's own grid.
GridFunction biconjugate_envelope(const GridFunction& f);

/// f(x) + g(y) - <x,y>; x must be a node of f, y a node of g.
double fenchel_gap(const GridFunction& f, const GridFunction& g, std::span<const double> x,
                   std::span<const double> y);

}  // namespace qcvx::legendre
