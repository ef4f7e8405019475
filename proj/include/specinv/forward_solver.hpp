#pragma once

#include "specinv/core_model.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <memory>

namespace specinv {

/// Discrete Neumann operator L = -Laplacian + q in generalized form K u = lambda M u.
///
/// K is the mass-weighted ghost-node stiffness (symmetric); M holds the
/// trapezoid weights. Immutable once assembled.
struct DiscreteOperator {
  std::shared_ptr<const Domain> domain;
  Potential potential;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass_weights;

  std::size_t dof() const noexcept { return static_cast<std::size_t>(mass_weights.size()); }
  const Grid& grid() const noexcept { return domain->grid; }
  const BoundaryMesh& boundary() const noexcept { return domain->boundary; }

  /// Neumann load vector b(f): boundary weight times data, scattered to the boundary nodes.
  Eigen::VectorXd neumann_load(const Eigen::VectorXd& f) const;
  /// Values of a nodal vector at the boundary nodes.
  Eigen::VectorXd restrict_to_boundary(const Eigen::VectorXd& u) const;
};

DiscreteOperator assemble_operator(std::shared_ptr<const Domain> domain, const Potential& q);

/// Lowest eigenpairs, mass-normalized, ascending. Eigenvector signs are
/// whatever the solver produced.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;  // dof x count
  Eigen::MatrixXd traces;   // boundary nodes x count
  std::size_t dof = 0;

  std::size_t count() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  bool complete() const noexcept { return count() == dof; }
};

/// j_max == 0 requests the full discrete basis.
EigenSystem eigensolve(const DiscreteOperator& op, std::size_t j_max);

struct BvpSolution {
  Eigen::VectorXd interior;
  Eigen::VectorXd trace;  // Dirichlet trace h = u|_S
};

/// Factorization of (K - lambda M) shared across many Neumann data vectors.
class ShiftedSolver {
 public:
  /// Throws NearSingular when the reciprocal condition number falls below rcond_min.
  ShiftedSolver(const DiscreteOperator& op, double lambda, double rcond_min = 1e-12);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  double lambda() const noexcept { return lambda_; }
  double rcond() const noexcept;

  /// Solve with outward normal derivative f on the boundary.
  BvpSolution solve(const Eigen::VectorXd& f) const;
  /// Solve with an arbitrary right-hand side (K - lambda M) u = b.
  Eigen::VectorXd solve_load(const Eigen::VectorXd& b) const;
  /// Neumann-to-Dirichlet matrix: column k is the trace for f = e_k.
  Eigen::MatrixXd nd_matrix() const;

 private:
  struct Impl;
  const DiscreteOperator* op_;
  double lambda_;
  std::unique_ptr<Impl> impl_;
};

BvpSolution solve_neumann_bvp(const DiscreteOperator& op, double lambda, const Eigen::VectorXd& f);

/// Outward normal derivative at the boundary nodes from second-order one-sided
/// differences of nodal values. Rectangle corners average the two edge normals.
Eigen::VectorXd normal_derivative(const Domain& domain, const Eigen::VectorXd& u);

}  // namespace specinv
