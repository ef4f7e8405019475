#include "specinv/core_model.hpp"

#include "specinv/error.hpp"

#include <cmath>
#include <string>

namespace specinv {

namespace {

Eigen::VectorXd trapezoid_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) = 0.5 * h;
  w(n - 1) = 0.5 * h;
  return w;
}

}  // namespace

double default_aspect() { return std::pow(2.0, 0.25); }

DomainSpec DomainSpec::interval(double a, int n) {
  DomainSpec s;
  s.kind = DomainKind::Interval;
  s.extent_a = a;
  s.n_a = n;
  return s;
}

DomainSpec DomainSpec::rectangle(double a, double b, int n_a, int n_b) {
  DomainSpec s;
  s.kind = DomainKind::Rectangle;
  s.extent_a = a;
  s.extent_b = b;
  s.n_a = n_a;
  s.n_b = n_b;
  return s;
}

DomainSpec DomainSpec::rectangle(double a, int n_a, int n_b) {
  return rectangle(a, a * default_aspect(), n_a, n_b);
}

void DomainSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); };
  if (!(extent_a > 0.0) || !std::isfinite(extent_a)) fail("extent_a must be positive");
  if (n_a < 8) fail("n_a must be at least 8");
  if (kind == DomainKind::Rectangle) {
    if (!(extent_b > 0.0) || !std::isfinite(extent_b)) fail("extent_b must be positive");
    if (n_b < 8) fail("n_b must be at least 8");
  }
}

Grid::Grid(const DomainSpec& spec) : spec_(spec) {
  spec_.validate();
  n_a_ = spec_.n_a;
  h_a_ = spec_.extent_a / (n_a_ - 1);
  wa_ = trapezoid_weights(n_a_, h_a_);
  if (is_rectangle()) {
    n_b_ = spec_.n_b;
    h_b_ = spec_.extent_b / (n_b_ - 1);
    wb_ = trapezoid_weights(n_b_, h_b_);
  } else {
    n_b_ = 1;
    h_b_ = 0.0;
    wb_ = Eigen::VectorXd::Ones(1);
  }
  mass_.resize(static_cast<Eigen::Index>(size()));
  for (int k = 0; k < n_b_; ++k)
    for (int i = 0; i < n_a_; ++i) mass_(static_cast<Eigen::Index>(index(i, k))) = wa_(i) * wb_(k);
}

BoundaryMesh BoundaryMesh::uniform_closed(std::size_t n, double perimeter) {
  if (n < 3 || !(perimeter > 0.0)) throw Error(ErrorCode::InvalidSpec, "closed mesh needs >= 3 nodes");
  BoundaryMesh m;
  m.closed = true;
  m.perimeter = perimeter;
  const double ds = perimeter / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.nodes.push_back(i);
    m.arclength.push_back(ds * static_cast<double>(i));
    m.weights.push_back(ds);
  }
  return m;
}

Domain build_domain(const DomainSpec& spec) {
  Grid grid(spec);
  BoundaryMesh mesh;
  if (!grid.is_rectangle()) {
    mesh.closed = false;
    mesh.nodes = {0, static_cast<std::size_t>(grid.n_a() - 1)};
    mesh.arclength = {0.0, spec.extent_a};
    mesh.weights = {1.0, 1.0};
    mesh.perimeter = 2.0;
    return Domain{std::move(grid), std::move(mesh)};
  }

  const int na = grid.n_a();
  const int nb = grid.n_b();
  std::vector<std::pair<int, int>> ij;
  for (int i = 0; i < na - 1; ++i) ij.emplace_back(i, 0);
  for (int k = 0; k < nb - 1; ++k) ij.emplace_back(na - 1, k);
  for (int i = na - 1; i > 0; --i) ij.emplace_back(i, nb - 1);
  for (int k = nb - 1; k > 0; --k) ij.emplace_back(0, k);

  mesh.closed = true;
  const std::size_t count = ij.size();
  std::vector<double> seg(count);  // length of segment from node p to node p+1
  for (std::size_t p = 0; p < count; ++p) {
    const auto [i0, k0] = ij[p];
    const auto [i1, k1] = ij[(p + 1) % count];
    seg[p] = std::abs(i1 - i0) * grid.h_a() + std::abs(k1 - k0) * grid.h_b();
  }
  double s = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    mesh.nodes.push_back(grid.index(ij[p].first, ij[p].second));
    mesh.arclength.push_back(s);
    mesh.weights.push_back(0.5 * (seg[(p + count - 1) % count] + seg[p]));
    s += seg[p];
  }
  mesh.perimeter = 2.0 * (spec.extent_a + spec.extent_b);
  return Domain{std::move(grid), std::move(mesh)};
}

Potential sample_potential(const Grid& grid, const ScalarField& formula) {
  Potential q;
  q.values.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double v = formula(grid.x(n), grid.y(n));
    if (!std::isfinite(v))
      throw Error(ErrorCode::NonFiniteValue, "potential not finite at node " + std::to_string(n));
    q.values(static_cast<Eigen::Index>(n)) = v;
  }
  return q;
}

void check_shape(const Grid& grid, const Potential& q) {
  if (q.size() != grid.size())
    throw Error(ErrorCode::ShapeMismatch, "potential has " + std::to_string(q.size()) +
                                              " values, grid has " + std::to_string(grid.size()));
  if (!q.values.allFinite()) throw Error(ErrorCode::NonFiniteValue, "potential has non-finite values");
}

double boundary_integral(const BoundaryMesh& mesh, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != mesh.size())
    throw Error(ErrorCode::ShapeMismatch, "boundary data size mismatch");
  double sum = 0.0;
  for (std::size_t p = 0; p < mesh.size(); ++p) sum += mesh.weights[p] * values(static_cast<Eigen::Index>(p));
  return sum;
}

double domain_integral(const Grid& grid, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw Error(ErrorCode::ShapeMismatch, "nodal data size mismatch");
  return grid.mass_weights().dot(values);
}

}  // namespace specinv
