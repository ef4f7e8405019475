#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace specinv {

enum class DomainKind { Interval, Rectangle };

/// Default rectangle aspect b/a = 2^(1/4). Keeps the separable Neumann
/// eigenvalues m^2 pi^2/a^2 + n^2 pi^2/b^2 pairwise distinct.
double default_aspect();

struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  double extent_a = 0.0;
  double extent_b = 0.0;  // Rectangle only
  int n_a = 0;
  int n_b = 0;  // Rectangle only

  static DomainSpec interval(double a, int n);
  static DomainSpec rectangle(double a, double b, int n_a, int n_b);
  /// Rectangle with extent_b = extent_a * default_aspect().
  static DomainSpec rectangle(double a, int n_a, int n_b);

  /// Throws InvalidSpec when extents are non-positive or grid counts < 8.
  void validate() const;
};

/// Uniform tensor grid. Node (i, k) has flat index i + n_a * k; the interval
/// case has a single row (n_b == 1).
class Grid {
 public:
  explicit Grid(const DomainSpec& spec);

  const DomainSpec& spec() const noexcept { return spec_; }
  bool is_rectangle() const noexcept { return spec_.kind == DomainKind::Rectangle; }
  int n_a() const noexcept { return n_a_; }
  int n_b() const noexcept { return n_b_; }
  double h_a() const noexcept { return h_a_; }
  double h_b() const noexcept { return h_b_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_a_) * n_b_; }
  std::size_t index(int i, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_a_) * k;
  }
  double x(std::size_t node) const noexcept { return h_a_ * static_cast<double>(node % n_a_); }
  double y(std::size_t node) const noexcept {
    return is_rectangle() ? h_b_ * static_cast<double>(node / n_a_) : 0.0;
  }

  /// Trapezoid weights realizing the discrete L2(D) inner product.
  const Eigen::VectorXd& mass_weights() const noexcept { return mass_; }
  /// 1D trapezoid weights along each axis (axis b is {1} for the interval).
  const Eigen::VectorXd& axis_weights_a() const noexcept { return wa_; }
  const Eigen::VectorXd& axis_weights_b() const noexcept { return wb_; }

 private:
  DomainSpec spec_;
  int n_a_;
  int n_b_;
  double h_a_;
  double h_b_;
  Eigen::VectorXd wa_;
  Eigen::VectorXd wb_;
  Eigen::VectorXd mass_;
};

/// Ordered boundary nodes with arclength coordinates and quadrature weights.
///
/// Rectangle: counterclockwise from the origin corner, closed, trapezoid
/// weights. Interval: the two endpoints, open, unit weights (point evaluation),
/// so `perimeter` is the counting measure 2.
struct BoundaryMesh {
  std::vector<std::size_t> nodes;  // flat grid indices
  std::vector<double> arclength;
  std::vector<double> weights;
  double perimeter = 0.0;
  bool closed = false;

  std::size_t size() const noexcept { return arclength.size(); }

  /// Closed curve of n equally spaced nodes on [0, perimeter) that is not tied
  /// to a grid; used for standalone sign recovery.
  static BoundaryMesh uniform_closed(std::size_t n, double perimeter);
};

struct Domain {
  Grid grid;
  BoundaryMesh boundary;
};

Domain build_domain(const DomainSpec& spec);

/// Real potential sampled at every grid node.
struct Potential {
  Eigen::VectorXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

using ScalarField = std::function<double(double x, double y)>;

/// Nodal sampling; throws NonFiniteValue if any sample is not finite.
Potential sample_potential(const Grid& grid, const ScalarField& formula);

/// Throws ShapeMismatch unless q has one value per grid node.
void check_shape(const Grid& grid, const Potential& q);

/// Trapezoid quadrature of nodal values over the boundary.
double boundary_integral(const BoundaryMesh& mesh, const Eigen::VectorXd& values);

/// Discrete L2(D) integral of nodal values.
double domain_integral(const Grid& grid, const Eigen::VectorXd& values);

}  // namespace specinv
