#pragma once

// Thin wrappers over the LAPACK routines used by the solvers. Column-major
// Eigen storage is passed straight through.

#include <Eigen/Dense>

namespace specinv::lapack {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // one column per value
};

/// Lowest `count` eigenpairs of the symmetric matrix `a` (dsyevr).
SymmetricEigen lowest_eigenpairs(Eigen::MatrixXd a, int count);

/// LU factorization with partial pivoting (dgetrf) and a 1-norm reciprocal
/// condition estimate (dgecon).
class LuFactor {
 public:
  explicit LuFactor(Eigen::MatrixXd a);

  double rcond() const noexcept { return rcond_; }
  bool singular() const noexcept { return singular_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  Eigen::MatrixXd lu_;
  Eigen::VectorXi pivots_;
  double rcond_ = 0.0;
  bool singular_ = false;
};

}  // namespace specinv::lapack
