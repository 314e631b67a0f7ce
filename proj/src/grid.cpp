#include "qcvx/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qcvx {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Point sub(std::span<const double> a, std::span<const double> b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// ---------------------------------------------------------------------------
// GridDomain

GridDomain::GridDomain(std::vector<double> mins, std::vector<double> maxs,
                       std::vector<std::size_t> shape)
    : mins_(std::move(mins)), maxs_(std::move(maxs)), shape_(std::move(shape)) {
  const std::size_t n = shape_.size();
  if (n == 0) throw DomainError("grid: dimension must be positive");
  if (mins_.size() != n || maxs_.size() != n)
    throw DomainError("grid: min/max/shape lengths differ");
  h_.resize(n);
  strides_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (shape_[k] < 2) throw DomainError("grid: every axis needs at least 2 nodes");
    if (!std::isfinite(mins_[k]) || !std::isfinite(maxs_[k]) || !(maxs_[k] > mins_[k]))
      throw DomainError("grid: require finite min < max on every axis");
    h_[k] = (maxs_[k] - mins_[k]) / static_cast<double>(shape_[k] - 1);
    if (!(h_[k] > 0.0) || !std::isfinite(h_[k])) throw DomainError("grid: degenerate spacing");
  }
  std::size_t s = 1;
  for (std::size_t k = n; k-- > 0;) {
    strides_[k] = s;
    s *= shape_[k];
  }
  size_ = s;
}

GridDomain GridDomain::line(double lo, double hi, std::size_t nodes) {
  return GridDomain({lo}, {hi}, {nodes});
}

GridDomain GridDomain::cube(std::size_t dim, double lo, double hi, std::size_t nodes) {
  return GridDomain(std::vector<double>(dim, lo), std::vector<double>(dim, hi),
                    std::vector<std::size_t>(dim, nodes));
}

double GridDomain::cell_volume() const {
  return std::accumulate(h_.begin(), h_.end(), 1.0, std::multiplies<>());
}

std::vector<std::size_t> GridDomain::unravel(std::size_t lin) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t k = 0; k < dim(); ++k) idx[k] = index_along(lin, k);
  return idx;
}

std::size_t GridDomain::ravel(std::span<const std::size_t> idx) const {
  std::size_t lin = 0;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (idx[k] >= shape_[k]) throw DomainError("grid: multi-index out of range");
    lin += idx[k] * strides_[k];
  }
  return lin;
}

Point GridDomain::node(std::size_t lin) const {
  Point x(dim());
  node_into(lin, x);
  return x;
}

void GridDomain::node_into(std::size_t lin, std::span<double> out) const {
  for (std::size_t k = 0; k < dim(); ++k) out[k] = coord(lin, k);
}

bool GridDomain::is_interior(std::size_t lin) const {
  for (std::size_t k = 0; k < dim(); ++k) {
    const std::size_t i = index_along(lin, k);
    if (i == 0 || i + 1 == shape_[k]) return false;
  }
  return true;
}

double GridDomain::boundary_distance(std::size_t lin) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dim(); ++k) {
    const double x = coord(lin, k);
    d = std::min({d, x - mins_[k], maxs_[k] - x});
  }
  return d;
}

std::size_t GridDomain::nearest(std::span<const double> x) const {
  std::size_t lin = 0;
  for (std::size_t k = 0; k < dim(); ++k) {
    double t = std::round((x[k] - mins_[k]) / h_[k]);
    t = std::clamp(t, 0.0, static_cast<double>(shape_[k] - 1));
    lin += static_cast<std::size_t>(t) * strides_[k];
  }
  return lin;
}

std::optional<std::size_t> GridDomain::find_node(std::span<const double> x) const {
  if (x.size() != dim()) return std::nullopt;
  std::size_t lin = 0;
  for (std::size_t k = 0; k < dim(); ++k) {
    const double t = (x[k] - mins_[k]) / h_[k];
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9 || r < 0 || r > static_cast<double>(shape_[k] - 1))
      return std::nullopt;
    lin += static_cast<std::size_t>(r) * strides_[k];
  }
  return lin;
}

bool GridDomain::operator==(const GridDomain& o) const {
  return mins_ == o.mins_ && maxs_ == o.maxs_ && shape_ == o.shape_;
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(GridDomain domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.size())
    throw DomainError("grid function: value count does not match the domain");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("grid function: non-finite value");
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim + 1) / 2, 0.0) {}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> upper)
    : dim_(dim), upper_(std::move(upper)) {
  if (upper_.size() != dim * (dim + 1) / 2)
    throw DomainError("symmetric matrix: wrong number of upper-triangle entries");
  for (double v : upper_)
    if (!std::isfinite(v)) throw DomainError("symmetric matrix: non-finite entry");
}

SymMatrix SymMatrix::identity(std::size_t dim, double scale) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, scale);
  return m;
}

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> a) {
  if (a.size() != dim * dim) throw DomainError("symmetric matrix: dense size mismatch");
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j)
      m.set(i, j, i == j ? a[i * dim + i] : 0.5 * (a[i * dim + j] + a[j * dim + i]));
  return m;
}

std::size_t SymMatrix::slot(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return i * dim_ - (i * (i - 1)) / 2 + (j - i);
}

Point SymMatrix::apply(std::span<const double> v) const {
  Point r(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

double SymMatrix::quad_form(std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    s += (*this)(i, i) * v[i] * v[i];
    for (std::size_t j = i + 1; j < dim_; ++j) s += 2.0 * (*this)(i, j) * v[i] * v[j];
  }
  return s;
}

std::vector<double> SymMatrix::dense() const {
  std::vector<double> a(dim_ * dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) a[i * dim_ + j] = (*this)(i, j);
  return a;
}

std::vector<double> SymMatrix::eigenvalues() const {
  if (dim_ == 1) return {upper_[0]};
  Eigen::MatrixXd m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double SymMatrix::min_eigenvalue() const { return eigenvalues().front(); }
double SymMatrix::max_eigenvalue() const { return eigenvalues().back(); }

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim_ != dim_) throw DomainError("symmetric matrix: dimension mismatch");
  SymMatrix r = *this;
  for (std::size_t i = 0; i < upper_.size(); ++i) r.upper_[i] += o.upper_[i];
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return *this + o * -1.0; }

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix r = *this;
  for (double& v : r.upper_) v *= s;
  return r;
}

// ---------------------------------------------------------------------------
// IndexRegion

IndexRegion::IndexRegion(GridDomain domain, std::vector<std::size_t> members, RegionShape shape)
    : domain_(std::move(domain)), members_(std::move(members)), shape_(std::move(shape)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= domain_.size())
    throw DomainError("region: member index outside the domain");
}

bool IndexRegion::contains(std::size_t lin) const {
  return std::binary_search(members_.begin(), members_.end(), lin);
}

std::vector<char> IndexRegion::mask() const {
  std::vector<char> m(domain_.size(), 0);
  for (std::size_t i : members_) m[i] = 1;
  return m;
}

double IndexRegion::boundary_distance(std::size_t lin) const {
  if (std::holds_alternative<BoxShape>(shape_)) return domain_.boundary_distance(lin);
  if (const auto* b = std::get_if<BallShape>(&shape_))
    return b->rho - distance(domain_.node(lin), b->center);
  throw DomainError("region: boundary distance needs a box or ball region");
}

IndexRegion full_region(const GridDomain& domain) {
  std::vector<std::size_t> all(domain.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return IndexRegion(domain, std::move(all), BoxShape{});
}

IndexRegion region_ball(const GridDomain& domain, std::span<const double> center, double rho) {
  if (center.size() != domain.dim()) throw DomainError("ball: center dimension mismatch");
  if (!(rho >= 0.0)) throw DomainError("ball: radius must be non-negative");
  // Exact-node distances may round a hair above rho; allow a relative ulp-scale slack.
  const double limit = rho * (1.0 + 1e-12) + 1e-14;
  std::vector<std::size_t> members;
  Point x(domain.dim());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    domain.node_into(i, x);
    if (distance(x, center) <= limit) members.push_back(i);
  }
  return IndexRegion(domain, std::move(members), BallShape{Point(center.begin(), center.end()), rho});
}

IndexRegion intersect(const IndexRegion& a, const IndexRegion& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.members().begin(), a.members().end(), b.members().begin(),
                        b.members().end(), std::back_inserter(out));
  return IndexRegion(a.domain(), std::move(out), a.shape());
}

GridFunction sample_quadratic(const GridDomain& domain, double c, std::span<const double> v, double r) {
  if (!(r > 0.0)) throw DomainError("sample_quadratic: radius must be positive");
  if (v.size() != domain.dim()) throw DomainError("sample_quadratic: vertex dimension mismatch");
  std::vector<double> vals(domain.size());
  const double inv = 1.0 / (2.0 * r);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < domain.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < domain.dim(); ++k) {
      const double d = domain.coord(i, k) - v[k];
      s += d * d;
    }
    vals[i] = c + s * inv;
  }
  return GridFunction(domain, std::move(vals));
}

double oscillation(const GridFunction& u, const IndexRegion& region) {
  if (region.empty()) throw DomainError("oscillation: empty region");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i : region.members()) {
    lo = std::min(lo, u[i]);
    hi = std::max(hi, u[i]);
  }
  return hi - lo;
}

double cell_measure(const IndexRegion& region) {
  return static_cast<double>(region.size()) * region.domain().cell_volume();
}

GridFunction add(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain() == b.domain())) throw DomainError("add: domains differ");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return GridFunction(a.domain(), std::move(v));
}

GridFunction scale(const GridFunction& a, double s) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= s;
  return GridFunction(a.domain(), std::move(v));
}

GridFunction add_isotropic_quadratic(const GridFunction& u, double lambda, std::span<const double> center) {
  const auto& dom = u.domain();
  std::vector<double> v(u.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < dom.dim(); ++k) {
      const double d = dom.coord(i, k) - center[k];
      s += d * d;
    }
    v[i] = u[i] + 0.5 * lambda * s;
  }
  return GridFunction(dom, std::move(v));
}

}  // namespace qcvx
