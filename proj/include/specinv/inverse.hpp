#pragma once

#include "specinv/core_model.hpp"
#include "specinv/forward_solver.hpp"
#include "specinv/spectral.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

namespace specinv {

/// Discrete Green identity for two potentials sharing Neumann data.
struct ProbeReport {
  double orthogonality_value = 0.0;  // integral over D of p u2 v1, p = q2 - q1
  double boundary_term = 0.0;        // integral over S of (u1 - u2) dN v1, dN v1 by one-sided differences
  double green_residual = 0.0;       // |orthogonality_value - boundary_term|
  /// Boundary term with dN v1 replaced by the imposed data g; matches
  /// orthogonality_value to roundoff for the ghost-node scheme.
  double boundary_term_imposed = 0.0;
};

ProbeReport orthogonality_probe(std::shared_ptr<const Domain> domain, const Potential& q1, const Potential& q2,
                                double lambda, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

struct DiscrepancyReport {
  double nd_discrepancy = 0.0;          // max over lambda of ||ND1 - ND2||_F
  double eigenvalue_discrepancy = 0.0;  // max_j |lambda_j(q1) - lambda_j(q2)|
  double trace_discrepancy = 0.0;       // max_j min over sign of ||phi_j1 - s phi_j2||_inf
  double spectral_discrepancy = 0.0;    // max_j of eigenvalue + trace terms
  double max_discrepancy = 0.0;         // max(nd_discrepancy, spectral_discrepancy)
};

/// Numerical uniqueness witness: compares N-D maps and boundary spectral data.
/// Throws DegenerateSpectrum if either of the first j_max eigenvalues is not
/// separated by eps_gap.
DiscrepancyReport distinguishability_test(std::shared_ptr<const Domain> domain, const Potential& q1,
                                          const Potential& q2, const std::vector<double>& lambdas, std::size_t j_max,
                                          double eps_gap = 1e-6);

/// q(c) = sum_k c_k * functions[k].
struct ParameterBasis {
  std::vector<Potential> functions;

  std::size_t size() const noexcept { return functions.size(); }
  Potential evaluate(const Eigen::VectorXd& coefficients) const;
};

/// Boundary data the reconstruction is fitted against. Either block may be absent.
struct ReconstructionData {
  std::optional<ExtractedData> spectral;
  /// Optional signed traces (row j, column boundary node) for the signed variant.
  std::optional<Eigen::MatrixXd> signed_traces;
  Eigen::VectorXd eigenvalue_weights;  // empty means all ones
  std::vector<NDOperator> nd_maps;
};

struct ReconstructionOptions {
  double reg_weight = 0.0;
  int max_iter = 50;
  double fd_step_rel = 1e-6;
  int max_halvings = 20;
  double rel_tol = 1e-10;
  bool use_signed_traces = false;
  double eps_gap = 1e-6;
};

struct ReconstructionResult {
  Potential q_estimate;
  Eigen::VectorXd coefficients;
  std::vector<double> misfit_history;  // objective after each accepted iterate, starting point first
  double data_misfit = 0.0;
  double reg_weight = 0.0;
  int iterations = 0;
};

/// Least-squares objective over parameter vectors; exposes residuals and
/// finite-difference Jacobians for the Gauss-Newton driver.
class ReconstructionProblem {
 public:
  ReconstructionProblem(std::shared_ptr<const Domain> domain, ParameterBasis basis, ReconstructionData data,
                        ReconstructionOptions options);

  /// Data residual vector (without the regularization rows).
  Eigen::VectorXd data_residual(const Eigen::VectorXd& c) const;
  /// Residual including sqrt(reg_weight) * c.
  Eigen::VectorXd residual(const Eigen::VectorXd& c) const;
  double objective(const Eigen::VectorXd& c) const;
  double data_misfit(const Eigen::VectorXd& c) const;
  /// Forward-difference Jacobian of residual(); `r0` is residual(c).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& c, const Eigen::VectorXd& r0) const;

  const ParameterBasis& basis() const noexcept { return basis_; }
  const ReconstructionOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<const Domain> domain_;
  ParameterBasis basis_;
  ReconstructionData data_;
  ReconstructionOptions options_;
};

/// Damped Gauss-Newton from `initial`; step halving up to max_halvings times.
ReconstructionResult reconstruct_potential(const ReconstructionProblem& problem, const Eigen::VectorXd& initial);

}  // namespace specinv
