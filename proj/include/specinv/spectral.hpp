#pragma once

#include "specinv/core_model.hpp"
#include "specinv/forward_solver.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace specinv {

/// theta(s_i, s_i, lambda_k) sampled on a lambda grid; row k, column i.
struct SpectralSamples {
  Eigen::VectorXd lambda_grid;
  Eigen::MatrixXd theta;
};

/// Recovered eigenvalues and squared boundary traces (row j, column i).
struct ExtractedData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd squared_traces;
  std::vector<std::string> warnings;

  std::size_t count() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Anything that can evaluate the diagonal boundary spectral function at an
/// arbitrary lambda. Used to refine jump locations beyond the sampling grid.
class ThetaSource {
 public:
  virtual ~ThetaSource() = default;
  /// theta(s_i, s_i, lambda) for every boundary node (left-continuous).
  virtual Eigen::VectorXd theta(double lambda) const = 0;
  /// Number of eigenvalues strictly below lambda, with multiplicity.
  virtual std::size_t count_below(double lambda) const = 0;
};

/// Exact breakpoint-list form of theta built from an eigensystem.
class ThetaSynthesizer final : public ThetaSource {
 public:
  explicit ThetaSynthesizer(const EigenSystem& eig);

  Eigen::VectorXd theta(double lambda) const override;
  std::size_t count_below(double lambda) const override;

  const Eigen::VectorXd& breakpoints() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& squared_traces() const noexcept { return squared_; }  // nodes x count

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd squared_;
};

/// theta(s_i, s_i, lambda_k) = sum over lambda_j < lambda_k of phi_j(s_i)^2.
/// Throws TruncationInsufficient unless the eigensystem is complete or its top
/// eigenvalue exceeds the largest grid value.
SpectralSamples synthesize_theta(const EigenSystem& eig, const Eigen::VectorXd& lambda_grid);

/// Uniform grid min, min + step, ... up to and including max (within step/2).
Eigen::VectorXd make_lambda_grid(double min, double max, double step);

struct ExtractionOptions {
  double eps_gap = 0.1;
  double jump_tol = 0.0;  // <= 0 selects 1e-12 * largest sampled theta
  int bisection_iterations = 24;
};

/// Locate the jumps of theta and read off squared traces.
///
/// A bracketing grid interval is a jump when any node rises by more than
/// jump_tol. With `refine` present the location is bisected on the exact
/// theta and the bracket multiplicity is checked; eigenvalues closer than
/// eps_gap raise DegenerateSpectrum.
ExtractedData extract_eigendata(const SpectralSamples& samples, const ExtractionOptions& options,
                                const ThetaSource* refine = nullptr);

/// G(s_i, t_k) = sum_{j <= j_cut} phi_j(s_i) phi_j(t_k) / (lambda_j - lambda).
/// j_cut == 0 gives the zero kernel. Throws NearEigenvalue when lambda is
/// within eps_gap of an included eigenvalue.
Eigen::MatrixXd resolvent_kernel(const EigenSystem& eig, double lambda, std::size_t j_cut, double eps_gap = 1e-10);

struct NDOperator {
  double lambda = 0.0;
  Eigen::MatrixXd map;  // h = map * f on nodal values
  Eigen::VectorXd weights;

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return map * f; }
  /// W^{1/2} G W^{1/2}; symmetric for a self-adjoint operator.
  Eigen::MatrixXd weight_normalized() const;
};

/// N-D map from the truncated resolvent kernel composed with boundary weights.
NDOperator nd_map(const EigenSystem& eig, double lambda, std::size_t j_cut, const BoundaryMesh& boundary,
                  double eps_gap = 1e-10);

/// Same map from direct linear solves of the Neumann problem.
NDOperator nd_map_direct(const DiscreteOperator& op, double lambda);

}  // namespace specinv
