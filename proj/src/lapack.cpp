#include "lapack.hpp"

#include "specinv/error.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

namespace specinv::lapack {

SymmetricEigen lowest_eigenpairs(Eigen::MatrixXd a, int count) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (count < 1 || count > n) throw Error(ErrorCode::PreconditionViolated, "requested eigenpair count out of range");
  SymmetricEigen out;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const char range = (count == n) ? 'A' : 'I';
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, a.data(), n, 0.0, 0.0, 1,
                                         count, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count)
    throw Error(ErrorCode::SolverFailure, "dsyevr failed (info=" + std::to_string(info) + ", found " +
                                              std::to_string(found) + " of " + std::to_string(count) + ")");
  out.values = w.head(count);
  out.vectors = std::move(z);
  return out;
}

LuFactor::LuFactor(Eigen::MatrixXd a) : lu_(std::move(a)) {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const double anorm = lu_.cwiseAbs().colwise().sum().maxCoeff();
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, ipiv.data());
  if (info < 0) throw Error(ErrorCode::SolverFailure, "dgetrf argument error");
  pivots_.resize(n);
  for (lapack_int i = 0; i < n; ++i) pivots_(i) = static_cast<int>(ipiv[static_cast<std::size_t>(i)]);
  if (info > 0) {
    singular_ = true;
    rcond_ = 0.0;
    return;
  }
  double rc = 0.0;
  if (LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, lu_.data(), n, anorm, &rc) != 0)
    throw Error(ErrorCode::SolverFailure, "dgecon failed");
  rcond_ = rc;
}

Eigen::MatrixXd LuFactor::solve(const Eigen::MatrixXd& rhs) const {
  if (singular_) throw Error(ErrorCode::NearSingular, "matrix is exactly singular");
  Eigen::MatrixXd x = rhs;
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  std::vector<lapack_int> ipiv(pivots_.data(), pivots_.data() + pivots_.size());
  const lapack_int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, static_cast<lapack_int>(x.cols()), lu_.data(),
                                         n, ipiv.data(), x.data(), n);
  if (info != 0) throw Error(ErrorCode::SolverFailure, "dgetrs failed");
  return x;
}

}  // namespace specinv::lapack
