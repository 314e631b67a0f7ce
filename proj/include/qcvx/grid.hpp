#pragma once

// Uniform box grids, sampled functions, symmetric matrices and index regions.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qcvx {

using Point = std::vector<double>;

/// Raised when an operation's precondition on its inputs does not hold.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when two routes that must agree do not (e.g. a witness that fails
/// re-validation). Never caught inside the library.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
Point sub(std::span<const double> a, std::span<const double> b);

class GridDomain {
 public:
  GridDomain(std::vector<double> mins, std::vector<double> maxs,
             std::vector<std::size_t> shape);

  /// 1-D convenience.
  static GridDomain line(double lo, double hi, std::size_t nodes);
  /// Same bounds and node count on every axis.
  static GridDomain cube(std::size_t dim, double lo, double hi, std::size_t nodes);

  std::size_t dim() const { return shape_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return h_; }
  double spacing(std::size_t axis) const { return h_[axis]; }
  /// Row-major: the last axis varies fastest.
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  double cell_volume() const;

  std::vector<std::size_t> unravel(std::size_t lin) const;
  std::size_t ravel(std::span<const std::size_t> idx) const;
  std::size_t index_along(std::size_t lin, std::size_t axis) const {
    return (lin / strides_[axis]) % shape_[axis];
  }
  double coord(std::size_t lin, std::size_t axis) const {
    return mins_[axis] + static_cast<double>(index_along(lin, axis)) * h_[axis];
  }
  Point node(std::size_t lin) const;
  void node_into(std::size_t lin, std::span<double> out) const;

  /// Not on any face of the box.
  bool is_interior(std::size_t lin) const;
  /// Euclidean distance from a node to the boundary of the box.
  double boundary_distance(std::size_t lin) const;
  /// Nearest node (per-axis rounding, clamped to the box).
  std::size_t nearest(std::span<const double> x) const;
  /// Linear index of the node exactly at x (within 1e-9 of a spacing), if any.
  std::optional<std::size_t> find_node(std::span<const double> x) const;

  bool operator==(const GridDomain& other) const;

 private:
  std::vector<double> mins_, maxs_, h_;
  std::vector<std::size_t> shape_, strides_;
  std::size_t size_ = 0;
};

/// Finite samples of a real function on every node of a domain.
class GridFunction {
 public:
  GridFunction(GridDomain domain, std::vector<double> values);

  const GridDomain& domain() const { return domain_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t lin) const { return values_[lin]; }
  std::size_t size() const { return values_.size(); }
  double sup_norm() const;

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

/// Symmetric n x n matrix stored as its upper triangle, row-major.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  SymMatrix(std::size_t dim, std::vector<double> upper);

  static SymMatrix identity(std::size_t dim, double scale = 1.0);
  /// Symmetrizes by averaging (a_ij + a_ji) / 2.
  static SymMatrix from_dense(std::size_t dim, std::span<const double> rowmajor);

  std::size_t dim() const { return dim_; }
  const std::vector<double>& entries() const { return upper_; }
  double operator()(std::size_t i, std::size_t j) const { return upper_[slot(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { upper_[slot(i, j)] = v; }

  Point apply(std::span<const double> v) const;
  double quad_form(std::span<const double> v) const;
  std::vector<double> dense() const;

  /// Ascending eigenvalues (self-adjoint solver, deterministic).
  std::vector<double> eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  bool operator==(const SymMatrix& o) const = default;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;
  std::size_t dim_ = 0;
  std::vector<double> upper_;
};

struct BoxShape {};
struct BallShape {
  Point center;
  double rho = 0.0;
};
/// Geometry a region was cut from; needed where the boundary of X matters.
using RegionShape = std::variant<std::monostate, BoxShape, BallShape>;

/// Sorted, duplicate-free subset of the nodes of a domain.
class IndexRegion {
 public:
  IndexRegion(GridDomain domain, std::vector<std::size_t> members,
              RegionShape shape = std::monostate{});

  const GridDomain& domain() const { return domain_; }
  const std::vector<std::size_t>& members() const { return members_; }
  const RegionShape& shape() const { return shape_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(std::size_t lin) const;
  /// Byte mask over all domain nodes.
  std::vector<char> mask() const;

  /// Distance from a member node to the boundary of the region's shape.
  double boundary_distance(std::size_t lin) const;

  bool operator==(const IndexRegion& o) const { return members_ == o.members_; }

 private:
  GridDomain domain_;
  std::vector<std::size_t> members_;
  RegionShape shape_;
};

IndexRegion full_region(const GridDomain& domain);
/// Closed Euclidean ball; may be empty.
IndexRegion region_ball(const GridDomain& domain, std::span<const double> center, double rho);
/// Members of a that are also in b; keeps a's shape.
IndexRegion intersect(const IndexRegion& a, const IndexRegion& b);

/// c + |node - v|^2 / (2r) at every node.
GridFunction sample_quadratic(const GridDomain& domain, double c, std::span<const double> v, double r);
/// max - min of u over the region.
double oscillation(const GridFunction& u, const IndexRegion& region);
/// |members| times the cell volume.
double cell_measure(const IndexRegion& region);

/// Pointwise a + b (same domain).
GridFunction add(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& a, double s);
/// u + (lambda/2)|x - center|^2.
GridFunction add_isotropic_quadratic(const GridFunction& u, double lambda, std::span<const double> center);

}  // namespace qcvx
